#pragma once

#include <span>
#include <string>
#include <vector>

#include "hk/ensemble.hpp"
#include "hk/hamiltonian.hpp"
#include "hk/phase_space.hpp"

namespace hk {

enum class ObservableTag { Identity, PositionSqHalf, Kinetic, Torsional, HenonHeilesPotential };

/// Operator whose coherent-state cross elements have a closed form.
struct ObservableKind {
  ObservableTag tag = ObservableTag::Identity;
  double sigma = 0.0;  ///< Henon-Heiles coupling

  static ObservableKind identity() { return {ObservableTag::Identity, 0.0}; }
  static ObservableKind position_sq_half() { return {ObservableTag::PositionSqHalf, 0.0}; }
  static ObservableKind kinetic() { return {ObservableTag::Kinetic, 0.0}; }
  static ObservableKind torsional() { return {ObservableTag::Torsional, 0.0}; }
  static ObservableKind henon_heiles_potential(double sigma) { return {ObservableTag::HenonHeilesPotential, sigma}; }

  std::string name() const;
  /// Classical symbol a(q, p) at a flat phase-space point.
  double symbol(std::span<const double> z) const;
};

/// Potential-energy observable of H; throws for the free particle (check has_potential()).
ObservableKind potential_observable(const SeparableHamiltonian& H);
inline bool has_potential(const SeparableHamiltonian& H) { return H.kind() != PotentialKind::Free; }

// Cross matrix elements <g_{z1}, Obs g_{z2}> for flat points z = [q, p].
Complex overlap_identity(std::span<const double> z1, std::span<const double> z2, double eps);
Complex overlap_harmonic(std::span<const double> z1, std::span<const double> z2, double eps);
Complex overlap_kinetic(std::span<const double> z1, std::span<const double> z2, double eps);
Complex overlap_torsional(std::span<const double> z1, std::span<const double> z2, double eps);
Complex overlap_henon_heiles(std::span<const double> z1, std::span<const double> z2, double eps, double sigma);
/// x^alpha with alpha[k] >= 0 and total degree <= 4.
Complex overlap_monomial(std::span<const double> z1, std::span<const double> z2, double eps,
                         std::span<const int> alpha);
Complex overlap(const ObservableKind& obs, std::span<const double> z1, std::span<const double> z2, double eps);

inline Complex overlap(const ObservableKind& obs, const PhasePoint& z1, const PhasePoint& z2, double eps) {
  return overlap(obs, z1.flat(), z2.flat(), eps);
}

struct ExpectationValue {
  double value = 0.0;
  double imag_residue = 0.0;
};

/// A_M(t) over the pair records of an expectation-mode ensemble.
/// Invalid pairs are skipped and the average is over the remaining ones.
ExpectationValue expectation(const HKEnsemble& e, const ObservableKind& obs, unsigned workers = 0);

struct EnergySnapshot {
  double t = 0.0;
  double kinetic = 0.0;
  double potential = 0.0;
  double total = 0.0;   ///< kinetic + potential
  double norm = 0.0;    ///< A_M for the identity
  double imag_residue = 0.0;  ///< largest imaginary part among the three estimates
};

EnergySnapshot energies(const HKEnsemble& e, const SeparableHamiltonian& H, unsigned workers = 0);

}  // namespace hk
