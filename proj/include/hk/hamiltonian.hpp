#pragma once

#include <span>
#include <string>
#include <string_view>

namespace hk {

enum class PotentialKind { Free, Harmonic, Torsional, HenonHeiles };

/// h(q, p) = |p|^2/2 + V(q) with analytic gradient and Hessian of V.
class SeparableHamiltonian {
 public:
  SeparableHamiltonian(PotentialKind kind, int dimension, double sigma = 0.0);

  int dim() const { return dim_; }
  PotentialKind kind() const { return kind_; }
  double sigma() const { return sigma_; }
  std::string name() const;

  double kinetic(std::span<const double> p) const;
  double potential(std::span<const double> q) const;
  /// Writes dV/dq into grad (length d).
  void gradient(std::span<const double> q, std::span<double> grad) const;
  /// Writes the d x d row-major Hessian of V into hess.
  void hessian(std::span<const double> q, std::span<double> hess) const;
  /// True when the Hessian is diagonal for every q; lets callers skip the off-diagonal work.
  bool diagonal_hessian() const { return kind_ != PotentialKind::HenonHeiles; }
  /// Total energy at a flat phase-space point [q, p].
  double energy(std::span<const double> z) const;

 private:
  PotentialKind kind_;
  int dim_;
  double sigma_;
};

SeparableHamiltonian free_particle(int d);
SeparableHamiltonian harmonic_potential(int d);
SeparableHamiltonian torsional_potential(int d);
SeparableHamiltonian henon_heiles_potential(int d, double sigma);

/// Lookup by configuration name: "harmonic", "torsional", "henon_heiles" (and "free").
SeparableHamiltonian make_hamiltonian(std::string_view name, int d, double sigma = 0.0);

std::string_view potential_name(PotentialKind kind);

}  // namespace hk
