#include "hk/phase_space.hpp"

#include <cmath>
#include <numbers>

#include "hk/error.hpp"

namespace hk {

namespace {

void require_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) throw InvalidArgument("phase-space point has a non-finite component");
  }
}

}  // namespace

PhasePoint::PhasePoint(std::span<const double> q, std::span<const double> p) {
  if (q.size() != p.size() || q.empty()) {
    throw InvalidArgument("phase-space point needs q and p of equal length d >= 1");
  }
  z_.reserve(2 * q.size());
  z_.insert(z_.end(), q.begin(), q.end());
  z_.insert(z_.end(), p.begin(), p.end());
  require_finite(z_);
}

PhasePoint::PhasePoint(std::initializer_list<double> q, std::initializer_list<double> p)
    : PhasePoint(std::span<const double>(q.begin(), q.size()),
                 std::span<const double>(p.begin(), p.size())) {}

PhasePoint PhasePoint::from_flat(std::span<const double> z) {
  if (z.size() % 2 != 0 || z.empty()) throw InvalidArgument("flat phase-space point must have even length");
  return PhasePoint(z.first(z.size() / 2), z.last(z.size() / 2));
}

PhasePoint PhasePoint::origin(int d) {
  std::vector<double> zeros(static_cast<std::size_t>(d), 0.0);
  return PhasePoint(zeros, zeros);
}

GaussianPacket::GaussianPacket(PhasePoint c, double eps) : center(std::move(c)), epsilon(eps) {
  if (!(eps > 0.0)) throw InvalidArgument("packet epsilon must be positive");
}

Complex packet_value(std::span<const double> z, double epsilon, std::span<const double> x) {
  const std::size_t d = z.size() / 2;
  if (x.size() != d) throw InvalidArgument("packet evaluation point has wrong dimension");
  double re = 0.0;
  double im = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    const double u = x[k] - z[k];
    re -= u * u;
    im += z[d + k] * u;
  }
  const double norm = std::pow(std::numbers::pi * epsilon, -0.25 * static_cast<double>(d));
  return norm * std::exp(Complex(re / (2.0 * epsilon), im / epsilon));
}

Complex eval_packet(const GaussianPacket& g, std::span<const double> x) {
  return packet_value(g.center.flat(), g.epsilon, x);
}

FourierImage packet_fourier_image(const GaussianPacket& g) {
  const auto q = g.center.q();
  const auto p = g.center.p();
  double pq = 0.0;
  std::vector<double> minus_q(q.size());
  for (std::size_t k = 0; k < q.size(); ++k) {
    pq += p[k] * q[k];
    minus_q[k] = -q[k];
  }
  return {std::exp(Complex(0.0, -pq / g.epsilon)), GaussianPacket(PhasePoint(p, minus_q), g.epsilon)};
}

}  // namespace hk
