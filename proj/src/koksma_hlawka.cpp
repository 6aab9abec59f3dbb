#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "hk/error.hpp"
#include "hk/sampling.hpp"

namespace hk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class F>
double integrate(F&& f, double a, double b, double& error_sum) {
  double err = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-14, &err);
  if (!std::isfinite(value) || !std::isfinite(err)) {
    throw QuadratureError("adaptive quadrature produced a non-finite result");
  }
  error_sum += err;
  return value;
}

}  // namespace

Density1d Density1d::standard_normal() {
  return {[](double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); },
          [](double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); },
          [](double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }};
}

KoksmaHlawkaReport koksma_hlawka_residual_1d(const TestFunction1d& f, const Density1d& mu,
                                             std::span<const double> points) {
  if (points.empty()) throw InvalidArgument("discrepancy identity needs at least one point");
  std::vector<double> x(points.begin(), points.end());
  std::sort(x.begin(), x.end());
  const double m = static_cast<double>(x.size());

  KoksmaHlawkaReport report;
  double sample_mean = 0.0;
  for (double xi : x) sample_mean += f.f(xi);
  sample_mean /= m;

  const double integral =
      integrate([&](double y) { return f.f(y) * mu.pdf(y); }, -kInf, kInf, report.quadrature_error);
  report.mean_error = sample_mean - integral;

  // D_M(y) is piecewise smooth with jumps at the nodes; integrate each piece separately.
  double rhs = 0.0;
  for (std::size_t k = 0; k <= x.size(); ++k) {
    const double lo = k == 0 ? -kInf : x[k - 1];
    const double hi = k == x.size() ? kInf : x[k];
    if (!(hi > lo)) continue;
    const double empirical = static_cast<double>(k) / m;
    auto piece = [&](double y) {
      if (k == x.size()) return f.df(y) * (mu.sf ? mu.sf(y) : 1.0 - mu.cdf(y));
      const double disc = empirical - mu.cdf(y);
      return f.df(y) * disc;
    };
    rhs += integrate(piece, lo, hi, report.quadrature_error);
  }
  report.discrepancy_integral = -rhs;
  report.residual = std::abs(report.mean_error - report.discrepancy_integral);
  if (report.quadrature_error > 1e-6) {
    throw QuadratureError("discrepancy quadrature did not converge (error estimate " +
                          std::to_string(report.quadrature_error) + ")");
  }
  return report;
}

}  // namespace hk
