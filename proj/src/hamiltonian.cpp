#include "hk/hamiltonian.hpp"

#include <algorithm>
#include <cmath>

#include "hk/error.hpp"

namespace hk {

SeparableHamiltonian::SeparableHamiltonian(PotentialKind kind, int dimension, double sigma)
    : kind_(kind), dim_(dimension), sigma_(sigma) {
  if (dimension < 1) throw InvalidArgument("Hamiltonian dimension must be >= 1");
  if (kind == PotentialKind::HenonHeiles && dimension < 2) {
    throw InvalidArgument("Henon-Heiles potential needs dimension >= 2");
  }
  if (!std::isfinite(sigma)) throw InvalidArgument("sigma must be finite");
}

std::string SeparableHamiltonian::name() const { return std::string(potential_name(kind_)); }

double SeparableHamiltonian::kinetic(std::span<const double> p) const {
  double t = 0.0;
  for (double v : p) t += v * v;
  return 0.5 * t;
}

double SeparableHamiltonian::potential(std::span<const double> q) const {
  double v = 0.0;
  switch (kind_) {
    case PotentialKind::Free:
      break;
    case PotentialKind::Harmonic:
      for (double x : q) v += 0.5 * x * x;
      break;
    case PotentialKind::Torsional:
      for (double x : q) v += 1.0 - std::cos(x);
      break;
    case PotentialKind::HenonHeiles: {
      const double s = sigma_;
      for (double x : q) v += 0.5 * x * x;
      for (int k = 0; k + 1 < dim_; ++k) {
        const double a = q[k];
        const double b = q[k + 1];
        const double r2 = a * a + b * b;
        v += s * (a * b * b - a * a * a / 3.0) + (s * s / 16.0) * r2 * r2;
      }
      break;
    }
  }
  return v;
}

void SeparableHamiltonian::gradient(std::span<const double> q, std::span<double> grad) const {
  switch (kind_) {
    case PotentialKind::Free:
      std::fill(grad.begin(), grad.end(), 0.0);
      break;
    case PotentialKind::Harmonic:
      std::copy(q.begin(), q.end(), grad.begin());
      break;
    case PotentialKind::Torsional:
      for (int k = 0; k < dim_; ++k) grad[k] = std::sin(q[k]);
      break;
    case PotentialKind::HenonHeiles: {
      const double s = sigma_;
      const double quartic = s * s / 4.0;
      std::copy(q.begin(), q.end(), grad.begin());
      for (int k = 0; k + 1 < dim_; ++k) {
        const double a = q[k];
        const double b = q[k + 1];
        const double r2 = a * a + b * b;
        grad[k] += s * (b * b - a * a) + quartic * a * r2;
        grad[k + 1] += 2.0 * s * a * b + quartic * b * r2;
      }
      break;
    }
  }
}

void SeparableHamiltonian::hessian(std::span<const double> q, std::span<double> hess) const {
  const int d = dim_;
  std::fill(hess.begin(), hess.end(), 0.0);
  switch (kind_) {
    case PotentialKind::Free:
      break;
    case PotentialKind::Harmonic:
      for (int k = 0; k < d; ++k) hess[k * d + k] = 1.0;
      break;
    case PotentialKind::Torsional:
      for (int k = 0; k < d; ++k) hess[k * d + k] = std::cos(q[k]);
      break;
    case PotentialKind::HenonHeiles: {
      const double s = sigma_;
      const double quartic = s * s / 4.0;
      for (int k = 0; k < d; ++k) hess[k * d + k] = 1.0;
      for (int k = 0; k + 1 < d; ++k) {
        const double a = q[k];
        const double b = q[k + 1];
        const double ab = 2.0 * s * b + 2.0 * quartic * a * b;
        hess[k * d + k] += -2.0 * s * a + quartic * (3.0 * a * a + b * b);
        hess[(k + 1) * d + k + 1] += 2.0 * s * a + quartic * (a * a + 3.0 * b * b);
        hess[k * d + k + 1] += ab;
        hess[(k + 1) * d + k] += ab;
      }
      break;
    }
  }
}

double SeparableHamiltonian::energy(std::span<const double> z) const {
  const auto d = static_cast<std::size_t>(dim_);
  return kinetic(z.subspan(d, d)) + potential(z.first(d));
}

SeparableHamiltonian free_particle(int d) { return {PotentialKind::Free, d}; }
SeparableHamiltonian harmonic_potential(int d) { return {PotentialKind::Harmonic, d}; }
SeparableHamiltonian torsional_potential(int d) { return {PotentialKind::Torsional, d}; }
SeparableHamiltonian henon_heiles_potential(int d, double sigma) {
  return {PotentialKind::HenonHeiles, d, sigma};
}

SeparableHamiltonian make_hamiltonian(std::string_view name, int d, double sigma) {
  if (name == "harmonic") return harmonic_potential(d);
  if (name == "torsional") return torsional_potential(d);
  if (name == "henon_heiles") return henon_heiles_potential(d, sigma);
  if (name == "free") return free_particle(d);
  throw InvalidArgument("unknown potential '" + std::string(name) + "'");
}

std::string_view potential_name(PotentialKind kind) {
  switch (kind) {
    case PotentialKind::Free: return "free";
    case PotentialKind::Harmonic: return "harmonic";
    case PotentialKind::Torsional: return "torsional";
    case PotentialKind::HenonHeiles: return "henon_heiles";
  }
  return "unknown";
}

}  // namespace hk
