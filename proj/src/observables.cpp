#include "hk/observables.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "hk/error.hpp"
#include "hk/parallel.hpp"

namespace hk {

namespace {

constexpr std::size_t kPairChunk = 1024;

void check_pair(std::span<const double> z1, std::span<const double> z2) {
  if (z1.size() != z2.size() || z1.empty() || z1.size() % 2 != 0) {
    throw InvalidArgument("overlap arguments must have equal, even length");
  }
}

/// Centre of the complex Gaussian conj(g1) g2 along axis k; its variance is eps/2.
Complex product_centre(std::span<const double> z1, std::span<const double> z2, std::size_t k) {
  const std::size_t d = z1.size() / 2;
  return {0.5 * (z1[k] + z2[k]), 0.5 * (z2[d + k] - z1[d + k])};
}

/// Moments E[x^j], j <= 4, of the normalised complex Gaussian with centre c and variance s.
std::array<Complex, 5> moments(Complex c, double s) {
  std::array<Complex, 5> m{};
  m[0] = 1.0;
  m[1] = c;
  for (int j = 1; j < 4; ++j) m[j + 1] = c * m[j] + static_cast<double>(j) * s * m[j - 1];
  return m;
}

double henon_heiles_symbol(std::span<const double> q, double s) {
  double v = 0.0;
  for (double x : q) v += 0.5 * x * x;
  for (std::size_t k = 0; k + 1 < q.size(); ++k) {
    const double a = q[k];
    const double b = q[k + 1];
    const double r2 = a * a + b * b;
    v += s * (a * b * b - a * a * a / 3.0) + (s * s / 16.0) * r2 * r2;
  }
  return v;
}

/// Obs/<g1,g2> for the potentials and the kinetic energy; the identity factor is applied by the caller.
Complex relative_element(const ObservableKind& obs, std::span<const double> z1, std::span<const double> z2,
                         double eps) {
  const std::size_t d = z1.size() / 2;
  Complex sum = 0.0;
  switch (obs.tag) {
    case ObservableTag::Identity:
      return 1.0;
    case ObservableTag::PositionSqHalf:
      for (std::size_t k = 0; k < d; ++k) {
        const Complex c = product_centre(z1, z2, k);
        sum += 0.25 * eps + 0.5 * c * c;
      }
      return sum;
    case ObservableTag::Kinetic:
      // Harmonic element at the Fourier-rotated points (q, p) -> (p, -q).
      for (std::size_t k = 0; k < d; ++k) {
        const Complex w((z1[d + k] + z2[d + k]), (z1[k] - z2[k]));
        sum += 0.25 * eps + 0.125 * w * w;
      }
      return sum;
    case ObservableTag::Torsional: {
      const double damp = std::exp(-0.25 * eps);
      for (std::size_t k = 0; k < d; ++k) {
        const Complex arg(0.5 * (z1[d + k] - z2[d + k]), 0.5 * (z1[k] + z2[k]));
        sum += 1.0 - damp * std::cosh(arg);
      }
      return sum;
    }
    case ObservableTag::HenonHeilesPotential: {
      const double s = obs.sigma;
      std::vector<std::array<Complex, 5>> m(d);
      for (std::size_t k = 0; k < d; ++k) m[k] = moments(product_centre(z1, z2, k), 0.5 * eps);
      for (std::size_t k = 0; k < d; ++k) sum += 0.5 * m[k][2];
      for (std::size_t k = 0; k + 1 < d; ++k) {
        const auto& a = m[k];
        const auto& b = m[k + 1];
        sum += s * (a[1] * b[2] - a[3] / 3.0);
        sum += (s * s / 16.0) * (a[4] + 2.0 * a[2] * b[2] + b[4]);
      }
      return sum;
    }
  }
  return sum;
}

}  // namespace

std::string ObservableKind::name() const {
  switch (tag) {
    case ObservableTag::Identity:
      return "identity";
    case ObservableTag::PositionSqHalf:
      return "position_sq_half";
    case ObservableTag::Kinetic:
      return "kinetic";
    case ObservableTag::Torsional:
      return "torsional";
    case ObservableTag::HenonHeilesPotential:
      return "henon_heiles_potential";
  }
  return "unknown";
}

double ObservableKind::symbol(std::span<const double> z) const {
  const std::size_t d = z.size() / 2;
  const auto q = z.first(d);
  const auto p = z.subspan(d);
  double v = 0.0;
  switch (tag) {
    case ObservableTag::Identity:
      return 1.0;
    case ObservableTag::PositionSqHalf:
      for (double x : q) v += 0.5 * x * x;
      return v;
    case ObservableTag::Kinetic:
      for (double x : p) v += 0.5 * x * x;
      return v;
    case ObservableTag::Torsional:
      for (double x : q) v += 1.0 - std::cos(x);
      return v;
    case ObservableTag::HenonHeilesPotential:
      return henon_heiles_symbol(q, sigma);
  }
  return v;
}

ObservableKind potential_observable(const SeparableHamiltonian& H) {
  switch (H.kind()) {
    case PotentialKind::Harmonic:
      return ObservableKind::position_sq_half();
    case PotentialKind::Torsional:
      return ObservableKind::torsional();
    case PotentialKind::HenonHeiles:
      return ObservableKind::henon_heiles_potential(H.sigma());
    case PotentialKind::Free:
      break;
  }
  throw InvalidArgument("the free particle has no potential observable");
}

Complex overlap_identity(std::span<const double> z1, std::span<const double> z2, double eps) {
  check_pair(z1, z2);
  const std::size_t d = z1.size() / 2;
  double dist2 = 0.0;
  double phase = 0.0;
  for (std::size_t k = 0; k < 2 * d; ++k) dist2 += (z1[k] - z2[k]) * (z1[k] - z2[k]);
  for (std::size_t k = 0; k < d; ++k) phase += (z1[d + k] + z2[d + k]) * (z1[k] - z2[k]);
  return std::exp(-dist2 / (4.0 * eps)) * std::polar(1.0, phase / (2.0 * eps));
}

Complex overlap_harmonic(std::span<const double> z1, std::span<const double> z2, double eps) {
  return overlap(ObservableKind::position_sq_half(), z1, z2, eps);
}

Complex overlap_kinetic(std::span<const double> z1, std::span<const double> z2, double eps) {
  return overlap(ObservableKind::kinetic(), z1, z2, eps);
}

Complex overlap_torsional(std::span<const double> z1, std::span<const double> z2, double eps) {
  return overlap(ObservableKind::torsional(), z1, z2, eps);
}

Complex overlap_henon_heiles(std::span<const double> z1, std::span<const double> z2, double eps, double sigma) {
  if (z1.size() < 4) throw InvalidArgument("Henon-Heiles needs dimension >= 2");
  return overlap(ObservableKind::henon_heiles_potential(sigma), z1, z2, eps);
}

Complex overlap_monomial(std::span<const double> z1, std::span<const double> z2, double eps,
                         std::span<const int> alpha) {
  check_pair(z1, z2);
  const std::size_t d = z1.size() / 2;
  if (alpha.size() != d) throw InvalidArgument("monomial exponent has wrong length");
  int degree = 0;
  for (int a : alpha) {
    if (a < 0) throw InvalidArgument("monomial exponents must be non-negative");
    degree += a;
  }
  if (degree > 4) throw InvalidArgument("monomial degree above 4 is not supported");
  Complex prod = 1.0;
  for (std::size_t k = 0; k < d; ++k) {
    if (alpha[k] == 0) continue;
    prod *= moments(product_centre(z1, z2, k), 0.5 * eps)[static_cast<std::size_t>(alpha[k])];
  }
  return prod * overlap_identity(z1, z2, eps);
}

Complex overlap(const ObservableKind& obs, std::span<const double> z1, std::span<const double> z2, double eps) {
  check_pair(z1, z2);
  if (!(eps > 0.0)) throw InvalidArgument("epsilon must be positive");
  return relative_element(obs, z1, z2, eps) * overlap_identity(z1, z2, eps);
}

namespace {

struct PairSums {
  Complex kinetic = 0.0;
  Complex potential = 0.0;
  Complex norm = 0.0;
  Complex single = 0.0;
  std::size_t count = 0;
};

/// Chunked reduction over pairs; chunk partial sums are combined in chunk order.
template <class Body>
PairSums reduce_pairs(const HKEnsemble& e, unsigned workers, Body body) {
  if (e.mode != SampleMode::Expectation) throw InvalidArgument("expectation needs a paired ensemble");
  const std::size_t pairs = e.size();
  const std::size_t chunks = (pairs + kPairChunk - 1) / kPairChunk;
  std::vector<PairSums> partial(chunks);
  parallel_for(chunks, resolve_workers(workers), [&](std::size_t c) {
    PairSums acc;
    const std::size_t end = std::min(pairs, (c + 1) * kPairChunk);
    for (std::size_t m = c * kPairChunk; m < end; ++m) {
      if (!e.record_valid(m)) continue;
      const std::size_t iw = 2 * m;
      const std::size_t iz = 2 * m + 1;
      const Complex f = std::conj(e.weight(iw)) * e.weight(iz);
      body(acc, f, e.center(iw), e.center(iz));
      ++acc.count;
    }
    partial[c] = acc;
  });
  PairSums total;
  for (const auto& p : partial) {
    total.kinetic += p.kinetic;
    total.potential += p.potential;
    total.norm += p.norm;
    total.single += p.single;
    total.count += p.count;
  }
  if (total.count == 0) throw InvalidArgument("no valid pair records");
  return total;
}

}  // namespace

ExpectationValue expectation(const HKEnsemble& e, const ObservableKind& obs, unsigned workers) {
  const double eps = e.epsilon;
  const PairSums s = reduce_pairs(e, workers, [&](PairSums& acc, Complex f, auto w, auto z) {
    acc.single += f * overlap(obs, w, z, eps);
  });
  const Complex mean = s.single / static_cast<double>(s.count);
  return {mean.real(), mean.imag()};
}

EnergySnapshot energies(const HKEnsemble& e, const SeparableHamiltonian& H, unsigned workers) {
  if (H.dim() != e.d) throw InvalidArgument("Hamiltonian dimension does not match the ensemble");
  const double eps = e.epsilon;
  const bool with_potential = has_potential(H);
  const ObservableKind pot = with_potential ? potential_observable(H) : ObservableKind::identity();
  const ObservableKind kin = ObservableKind::kinetic();
  const PairSums s = reduce_pairs(e, workers, [&](PairSums& acc, Complex f, auto w, auto z) {
    const Complex base = f * overlap_identity(w, z, eps);
    acc.norm += base;
    acc.kinetic += base * relative_element(kin, w, z, eps);
    if (with_potential) acc.potential += base * relative_element(pot, w, z, eps);
  });
  const double inv = 1.0 / static_cast<double>(s.count);
  EnergySnapshot out;
  out.t = e.t;
  out.kinetic = s.kinetic.real() * inv;
  out.potential = s.potential.real() * inv;
  out.total = out.kinetic + out.potential;
  out.norm = s.norm.real() * inv;
  const double imag_total = (s.kinetic.imag() + s.potential.imag()) * inv;
  out.imag_residue = std::max({std::abs(s.kinetic.imag() * inv), std::abs(s.potential.imag() * inv),
                               std::abs(imag_total)});
  return out;
}

}  // namespace hk
