#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hk/fourier.hpp"
#include "hk/grid.hpp"
#include "hk/hamiltonian.hpp"
#include "hk/integrator.hpp"
#include "hk/observables.hpp"
#include "hk/sampling.hpp"

namespace hk {

/// Exact solution of the harmonic oscillator (d = 1) for the initial packet g_(x0, xi0).
WaveField analytic_harmonic(double x0, double xi0, double eps, double t, const GridSpec& grid);

struct SplitStepConfig {
  GridSpec grid;
  double tau = 0.01;
  SeparableHamiltonian potential{PotentialKind::Free, 1};
  double epsilon = 1.0;
  /// Fraction of |psi|^2 allowed in the outer fifth of the frequency band before
  /// the grid is reported as too coarse.
  double spectral_tail_tolerance = 1e-8;

  void validate() const;
};

/// Strang splitting e^{-iV tau/2eps} F^{-1} e^{-i eps |k|^2 tau/2} F e^{-iV tau/2eps} on a periodic grid.
class SplitStepSolver {
 public:
  explicit SplitStepSolver(SplitStepConfig cfg);

  const SplitStepConfig& config() const { return cfg_; }
  /// Advances values in place by `steps` steps of size tau.
  void advance(std::vector<Complex>& values, std::size_t steps);
  /// Fraction of |psi|^2 carried by wave numbers above 0.8 k_max on any axis.
  double spectral_tail(const std::vector<Complex>& values);

 private:
  SplitStepConfig cfg_;
  FftPlan plan_;
  std::vector<Complex> half_potential_;
  std::vector<Complex> kinetic_;
  std::vector<std::uint8_t> outer_band_;
};

/// Evolves psi0 to t_final = n tau. Throws GridMismatch when the spectral tail
/// of the result exceeds the configured tolerance.
WaveField split_step_evolve(const WaveField& psi0, const SplitStepConfig& cfg, double t_final);

struct GridEnergies {
  double kinetic = 0.0;
  double potential = 0.0;
  double total = 0.0;
  double norm = 0.0;
};

/// Kinetic (spectral) and potential energies of a position-space field.
GridEnergies grid_energies(const WaveField& psi, const SeparableHamiltonian& H);

struct LscIvrOptions {
  Sampler sampler = Sampler::QuasiMonteCarlo;
  std::uint64_t seed = 0;
  unsigned workers = 0;
};

/// values[k][j] is the estimate of observable j at times[k]; stderr_ the standard errors.
struct LscIvrSeries {
  std::vector<double> times;
  std::vector<std::vector<double>> values;
  std::vector<std::vector<double>> standard_error;
};

/// Plain LSC-IVR: average of classical symbols over the Wigner density of g_{z0}
/// (normal, variance eps/2 per coordinate) transported by the classical flow.
/// Every time must be a non-negative multiple of spec.tau.
LscIvrSeries lsc_ivr_expectation(const PhasePoint& z0, double eps, const SeparableHamiltonian& H,
                                 std::span<const ObservableKind> observables, const IntegratorSpec& spec,
                                 std::size_t samples, std::span<const double> times,
                                 const LscIvrOptions& options = {});

}  // namespace hk
