#pragma once

#include <span>
#include <vector>

#include "hk/hamiltonian.hpp"
#include "hk/prefactor.hpp"

namespace hk {

/// Symmetric composition of Stoermer-Verlet steps with c_1..c_s summing to one.
struct IntegratorSpec {
  int order = 2;
  double tau = 0.1;
  std::vector<double> coefficients{1.0};

  /// Integrator of order 2, 4, 6 or 8 with the built-in coefficient tables.
  static IntegratorSpec make(int order, double tau);
  void validate() const;
};

/// Stage coefficients of the symmetric composition method of the given order.
std::vector<double> composition_coefficients(int order);

/// Coupled state of one trajectory: flow, Jacobian W = D_z Phi^t, split
/// action and the continuous argument of det Z_t.
///
/// W is 2d x 2d row-major with block layout [[dqX, dpX], [dqXi, dpXi]].
struct TrajectoryState {
  int d = 1;
  std::vector<double> z;
  std::vector<double> jacobian;
  double action_kinetic = 0.0;
  double action_potential = 0.0;
  PrefactorState prefactor;
  double t = 0.0;

  static TrajectoryState initial(std::span<const double> z0);

  std::span<const double> q() const { return {z.data(), static_cast<std::size_t>(d)}; }
  std::span<const double> p() const { return {z.data() + d, static_cast<std::size_t>(d)}; }
  double action() const { return action_kinetic + action_potential; }
  Complex hk_factor() const { return hk_prefactor(prefactor, d); }
  bool finite() const;
};

/// Scratch buffers for one worker; avoids allocation in the stepping loop.
struct StepWorkspace {
  explicit StepWorkspace(int d);
  std::vector<double> grad;
  std::vector<double> hess;
  std::vector<Complex> zmat;
};

/// Kick p by -h grad V(q), the Xi-rows of W by -h Hess V(q) times the X-rows,
/// and accumulate S_V -= h V(q).
void kick(TrajectoryState& s, double h, const SeparableHamiltonian& H, StepWorkspace& ws);
/// Drift q by h p, the X-rows of W by h times the Xi-rows, and accumulate S_T += h |p|^2/2.
void drift(TrajectoryState& s, double h);

/// One kick-drift-kick Stoermer-Verlet step of size h (h < 0 allowed).
void verlet_step(TrajectoryState& s, double h, const SeparableHamiltonian& H, StepWorkspace& ws);
TrajectoryState verlet_step(TrajectoryState s, double h, const SeparableHamiltonian& H);

/// One full step of size spec.tau; afterwards det Z_t and its argument are refreshed.
void composition_step(TrajectoryState& s, const IntegratorSpec& spec, const SeparableHamiltonian& H,
                      StepWorkspace& ws);
TrajectoryState composition_step(TrajectoryState s, const IntegratorSpec& spec,
                                 const SeparableHamiltonian& H);

/// Recomputes det Z_t from the current Jacobian and advances the argument.
void refresh_prefactor(TrajectoryState& s, StepWorkspace& ws);

/// Flow-only version of composition_step on a flat [q, p] point.
void composition_flow_step(std::span<double> z, const IntegratorSpec& spec,
                           const SeparableHamiltonian& H, std::span<double> grad);

/// Number of steps n with n * tau == t_final; throws if t_final is not a multiple of tau.
std::size_t step_count(double t_final, double tau);

}  // namespace hk
