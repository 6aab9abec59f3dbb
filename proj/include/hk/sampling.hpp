#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "hk/phase_space.hpp"

namespace hk {

/// Multiplicative split of the FBI transform of g^eps_{z0}:
///   (2 pi eps)^{-d} <g_z, g_{z0}> = r0(z) * mu0(z)
/// with mu0 the normal density of mean z0 and covariance 2 eps Id on R^{2d}.
struct FbiDecomposition {
  PhasePoint z0;
  double epsilon = 1.0;

  int dim() const { return z0.dim(); }
  /// Standard deviation of mu0 along every phase-space coordinate.
  double sigma() const;
  double mu0(std::span<const double> z) const;
  Complex r0(std::span<const double> z) const;
};

FbiDecomposition decompose_gaussian_initial(const PhasePoint& z0, double epsilon);

enum class SampleMode { Wavefunction, Expectation };
enum class Sampler { MonteCarlo, QuasiMonteCarlo };

std::string_view to_string(Sampler s);
std::string_view to_string(SampleMode m);

/// Equal-weight phase-space nodes drawn from mu0 (or mu0 x mu0).
///
/// Nodes are stored as rows of 2d doubles [q, p]. In expectation mode a
/// record m occupies two consecutive rows: row 2m is w_m, row 2m+1 is z_m.
struct SamplePlan {
  SampleMode mode = SampleMode::Wavefunction;
  Sampler sampler = Sampler::MonteCarlo;
  std::uint64_t seed = 0;
  int d = 1;
  double epsilon = 1.0;
  std::vector<double> coords;
  std::vector<Complex> r0_values;

  /// Number of quadrature records M (pairs in expectation mode).
  std::size_t size() const;
  std::size_t rows() const { return d > 0 ? coords.size() / (2 * static_cast<std::size_t>(d)) : 0; }
  std::span<const double> row(std::size_t i) const {
    const auto w = 2 * static_cast<std::size_t>(d);
    return {coords.data() + i * w, w};
  }
  double weight() const { return 1.0 / static_cast<double>(size()); }
};

SamplePlan sample_mc(const FbiDecomposition& dec, std::size_t count, std::uint64_t seed);
SamplePlan sample_qmc(const FbiDecomposition& dec, std::size_t count);
SamplePlan sample_pairs(const FbiDecomposition& dec, std::size_t count, Sampler sampler,
                        std::uint64_t seed);

/// Returns 1 - 4^{-d}, the normalised t=0 integrand variance for a Gaussian initial state.
/// The unnormalised mean squared L2 error for M nodes is 4^d (1 - 4^{-d}) / M,
/// because ||r0 g_z||^2 = 4^d.
double initial_variance_gaussian(int d);

/// Writes one node per row, components separated by spaces, after a '#' metadata line.
void write_plan(std::ostream& os, const SamplePlan& plan);

// -- low-level generators -------------------------------------------------

/// Van der Corput radical inverse of index in the given base.
double radical_inverse(std::uint64_t index, unsigned base);

/// First n primes (2, 3, 5, ...), used as Halton bases.
std::vector<unsigned> first_primes(std::size_t n);

/// Unscrambled Halton sequence; index 0 is skipped so the first point is (1/2, 1/3, ...).
class HaltonSequence {
 public:
  explicit HaltonSequence(std::size_t dimension);
  std::size_t dimension() const { return bases_.size(); }
  /// Writes point number `index` (1-based) into out.
  void point(std::uint64_t index, std::span<double> out) const;

 private:
  std::vector<unsigned> bases_;
};

/// Quantile of the standard normal distribution on (0, 1).
double inverse_normal_cdf(double u);

/// Seeded standard-normal stream (Marsaglia polar method on mt19937_64).
/// The output sequence depends only on the seed.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}
  double next();

 private:
  double uniform();
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// -- discrepancy identity -------------------------------------------------

struct TestFunction1d {
  std::function<double(double)> f;
  std::function<double(double)> df;
};

struct Density1d {
  std::function<double(double)> pdf;
  std::function<double(double)> cdf;
  /// Survival function 1 - cdf; optional, used for the upper tail when present.
  std::function<double(double)> sf;
  static Density1d standard_normal();
};

struct KoksmaHlawkaReport {
  double mean_error = 0.0;          ///< (1/M) sum f(x_m) - int f dmu
  double discrepancy_integral = 0.0;  ///< -int f'(y) D_M(y) dy
  double residual = 0.0;            ///< |mean_error - discrepancy_integral|
  double quadrature_error = 0.0;    ///< accumulated error estimate of the adaptive rules
};

/// Evaluates both sides of the one-dimensional discrepancy identity
///   (1/M) sum f(x_m) - int f dmu = -int f'(y) D_M(y) dy
/// by adaptive Gauss-Kronrod quadrature. Throws QuadratureError when the
/// rules fail to converge.
KoksmaHlawkaReport koksma_hlawka_residual_1d(const TestFunction1d& f, const Density1d& mu,
                                             std::span<const double> points);

}  // namespace hk
