#include "hk/sampling.hpp"

#include <boost/math/distributions/normal.hpp>

#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>

#include "hk/error.hpp"

namespace hk {

double FbiDecomposition::sigma() const { return std::sqrt(2.0 * epsilon); }

double FbiDecomposition::mu0(std::span<const double> z) const {
  const auto c = z0.flat();
  double r2 = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) r2 += (z[k] - c[k]) * (z[k] - c[k]);
  return std::pow(4.0 * std::numbers::pi * epsilon, -static_cast<double>(dim())) *
         std::exp(-r2 / (4.0 * epsilon));
}

Complex FbiDecomposition::r0(std::span<const double> z) const {
  const auto d = static_cast<std::size_t>(dim());
  const auto q0 = z0.q();
  const auto p0 = z0.p();
  double phase = 0.0;
  for (std::size_t k = 0; k < d; ++k) phase += (z[d + k] + p0[k]) * (z[k] - q0[k]);
  return std::ldexp(1.0, static_cast<int>(d)) * std::exp(Complex(0.0, phase / (2.0 * epsilon)));
}

FbiDecomposition decompose_gaussian_initial(const PhasePoint& z0, double epsilon) {
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  if (z0.dim() < 1) throw InvalidArgument("initial centre must have dimension >= 1");
  return {z0, epsilon};
}

std::string_view to_string(Sampler s) { return s == Sampler::MonteCarlo ? "mc" : "qmc"; }
std::string_view to_string(SampleMode m) {
  return m == SampleMode::Wavefunction ? "wavefunction" : "expectation";
}

std::size_t SamplePlan::size() const {
  return mode == SampleMode::Expectation ? rows() / 2 : rows();
}

namespace {

SamplePlan empty_plan(const FbiDecomposition& dec, std::size_t count, SampleMode mode,
                      Sampler sampler, std::uint64_t seed) {
  if (count == 0) throw InvalidArgument("sample count M must be >= 1");
  SamplePlan plan;
  plan.mode = mode;
  plan.sampler = sampler;
  plan.seed = seed;
  plan.d = dec.dim();
  plan.epsilon = dec.epsilon;
  const std::size_t rows = mode == SampleMode::Expectation ? 2 * count : count;
  plan.coords.reserve(rows * 2 * static_cast<std::size_t>(plan.d));
  plan.r0_values.reserve(rows);
  return plan;
}

void finish_r0(const FbiDecomposition& dec, SamplePlan& plan) {
  for (std::size_t i = 0; i < plan.rows(); ++i) plan.r0_values.push_back(dec.r0(plan.row(i)));
}

// Fills `count` rows of width `width` (a multiple of 2d) from standard-normal draws.
template <class Draw>
void fill_gaussian_rows(const FbiDecomposition& dec, std::size_t count, std::size_t width,
                        SamplePlan& plan, Draw&& draw) {
  const auto c = dec.z0.flat();
  const double s = dec.sigma();
  std::vector<double> buf(width);
  for (std::size_t m = 0; m < count; ++m) {
    draw(m, std::span<double>(buf));
    for (std::size_t j = 0; j < width; ++j) plan.coords.push_back(c[j % c.size()] + s * buf[j]);
  }
}

}  // namespace

SamplePlan sample_mc(const FbiDecomposition& dec, std::size_t count, std::uint64_t seed) {
  auto plan = empty_plan(dec, count, SampleMode::Wavefunction, Sampler::MonteCarlo, seed);
  NormalStream normals(seed);
  fill_gaussian_rows(dec, count, 2 * plan.d, plan, [&](std::size_t, std::span<double> out) {
    for (double& x : out) x = normals.next();
  });
  finish_r0(dec, plan);
  return plan;
}

SamplePlan sample_qmc(const FbiDecomposition& dec, std::size_t count) {
  auto plan = empty_plan(dec, count, SampleMode::Wavefunction, Sampler::QuasiMonteCarlo, 0);
  const HaltonSequence halton(2 * static_cast<std::size_t>(plan.d));
  fill_gaussian_rows(dec, count, 2 * plan.d, plan, [&](std::size_t m, std::span<double> out) {
    halton.point(m + 1, out);
    for (double& x : out) x = inverse_normal_cdf(x);
  });
  finish_r0(dec, plan);
  return plan;
}

SamplePlan sample_pairs(const FbiDecomposition& dec, std::size_t count, Sampler sampler,
                        std::uint64_t seed) {
  auto plan = empty_plan(dec, count, SampleMode::Expectation, sampler,
                         sampler == Sampler::MonteCarlo ? seed : 0);
  const std::size_t width = 4 * static_cast<std::size_t>(plan.d);
  if (sampler == Sampler::MonteCarlo) {
    NormalStream normals(seed);
    fill_gaussian_rows(dec, count, width, plan, [&](std::size_t, std::span<double> out) {
      for (double& x : out) x = normals.next();
    });
  } else {
    const HaltonSequence halton(width);
    fill_gaussian_rows(dec, count, width, plan, [&](std::size_t m, std::span<double> out) {
      halton.point(m + 1, out);
      for (double& x : out) x = inverse_normal_cdf(x);
    });
  }
  finish_r0(dec, plan);
  return plan;
}

double initial_variance_gaussian(int d) {
  if (d < 1) throw InvalidArgument("dimension must be >= 1");
  return 1.0 - std::pow(4.0, -static_cast<double>(d));
}

void write_plan(std::ostream& os, const SamplePlan& plan) {
  os << "# mode=" << to_string(plan.mode) << " sampler=" << to_string(plan.sampler)
     << " seed=" << plan.seed << " d=" << plan.d << " epsilon=" << plan.epsilon
     << " M=" << plan.size() << '\n';
  os << std::setprecision(17);
  const std::size_t rows_per_record = plan.mode == SampleMode::Expectation ? 2 : 1;
  for (std::size_t m = 0; m < plan.size(); ++m) {
    bool first = true;
    for (std::size_t r = 0; r < rows_per_record; ++r) {
      for (double x : plan.row(m * rows_per_record + r)) {
        if (!first) os << ' ';
        os << x;
        first = false;
      }
    }
    os << '\n';
  }
}

double radical_inverse(std::uint64_t index, unsigned base) {
  const double inv_base = 1.0 / base;
  double factor = inv_base;
  double result = 0.0;
  while (index > 0) {
    result += static_cast<double>(index % base) * factor;
    index /= base;
    factor *= inv_base;
  }
  return result;
}

std::vector<unsigned> first_primes(std::size_t n) {
  std::vector<unsigned> primes;
  for (unsigned candidate = 2; primes.size() < n; ++candidate) {
    bool is_prime = true;
    for (unsigned p : primes) {
      if (p * p > candidate) break;
      if (candidate % p == 0) {
        is_prime = false;
        break;
      }
    }
    if (is_prime) primes.push_back(candidate);
  }
  return primes;
}

HaltonSequence::HaltonSequence(std::size_t dimension) : bases_(first_primes(dimension)) {}

void HaltonSequence::point(std::uint64_t index, std::span<double> out) const {
  for (std::size_t j = 0; j < bases_.size(); ++j) out[j] = radical_inverse(index, bases_[j]);
}

double inverse_normal_cdf(double u) {
  if (!(u > 0.0 && u < 1.0)) throw InvalidArgument("inverse normal CDF needs u in (0, 1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(), u);
}

double NormalStream::uniform() {
  // 53 random mantissa bits mapped to [0, 1).
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double NormalStream::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double scale = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * scale;
  has_spare_ = true;
  return u * scale;
}

}  // namespace hk
