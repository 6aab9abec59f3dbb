#include "hk/reference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hk/error.hpp"
#include "hk/parallel.hpp"

namespace hk {

WaveField analytic_harmonic(double x0, double xi0, double eps, double t, const GridSpec& grid) {
  if (grid.d != 1) throw InvalidArgument("analytic harmonic solution is one-dimensional");
  if (!(eps > 0.0)) throw InvalidArgument("epsilon must be positive");
  const double c = std::cos(t);
  const double s = std::sin(t);
  const double q = x0 * c + xi0 * s;
  const double p = xi0 * c - x0 * s;
  const double action = 0.5 * s * ((xi0 * xi0 - x0 * x0) * c - 2.0 * xi0 * x0 * s);
  const Complex global = std::polar(1.0, action / eps - 0.5 * t);
  WaveField f = WaveField::zeros(grid, Representation::Position, eps, t);
  const double z[2] = {q, p};
  for (std::size_t j = 0; j < grid.n; ++j) {
    const double x = grid.coordinate(0, j);
    f.values[j] = global * packet_value(z, eps, std::span<const double>(&x, 1));
  }
  return f;
}

void SplitStepConfig::validate() const {
  grid.validate();
  if (!(tau > 0.0)) throw InvalidArgument("split-step tau must be positive");
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  if (potential.dim() != grid.d) throw InvalidArgument("potential dimension does not match the grid");
  if ((grid.n & (grid.n - 1)) != 0) throw InvalidArgument("split-step grid size must be a power of two");
  for (auto flag : grid.periodic) {
    if (!flag) throw InvalidArgument("split-step grid must be periodic on every axis");
  }
}

namespace {

/// Decodes a flat index into per-axis indices, axis 0 slowest.
void unflatten(std::size_t flat, std::size_t n, std::vector<std::size_t>& idx) {
  for (std::size_t k = idx.size(); k-- > 0;) {
    idx[k] = flat % n;
    flat /= n;
  }
}

}  // namespace

SplitStepSolver::SplitStepSolver(SplitStepConfig cfg) : cfg_(std::move(cfg)), plan_(cfg_.grid.d, cfg_.grid.n) {
  cfg_.validate();
  const auto& g = cfg_.grid;
  const std::size_t total = g.size();
  const double eps = cfg_.epsilon;
  const double tau = cfg_.tau;
  half_potential_.resize(total);
  kinetic_.resize(total);
  outer_band_.resize(total);
  std::vector<std::size_t> idx(static_cast<std::size_t>(g.d));
  std::vector<double> x(static_cast<std::size_t>(g.d));
  const long cut = static_cast<long>(0.8 * static_cast<double>(g.n / 2));
  for (std::size_t flat = 0; flat < total; ++flat) {
    unflatten(flat, g.n, idx);
    double k2 = 0.0;
    bool outer = false;
    for (int a = 0; a < g.d; ++a) {
      x[a] = g.coordinate(a, idx[a]);
      const long m = signed_frequency(idx[a], g.n);
      const double k = 2.0 * std::numbers::pi * static_cast<double>(m) / (g.upper[a] - g.lower[a]);
      k2 += k * k;
      outer = outer || std::abs(m) > cut;
    }
    half_potential_[flat] = std::polar(1.0, -0.5 * tau * cfg_.potential.potential(x) / eps);
    kinetic_[flat] = std::polar(1.0, -0.5 * tau * eps * k2) / static_cast<double>(total);
    outer_band_[flat] = outer ? 1 : 0;
  }
}

void SplitStepSolver::advance(std::vector<Complex>& values, std::size_t steps) {
  if (values.size() != half_potential_.size()) throw GridMismatch("field does not match the solver grid");
  if (steps == 0) return;
  const std::size_t total = values.size();
  // Adjacent potential half-steps are merged between full steps.
  for (std::size_t i = 0; i < total; ++i) values[i] *= half_potential_[i];
  for (std::size_t s = 0; s < steps; ++s) {
    plan_.forward(values);
    for (std::size_t i = 0; i < total; ++i) values[i] *= kinetic_[i];
    plan_.backward(values);
    if (s + 1 < steps) {
      for (std::size_t i = 0; i < total; ++i) values[i] *= half_potential_[i] * half_potential_[i];
    }
  }
  for (std::size_t i = 0; i < total; ++i) values[i] *= half_potential_[i];
}

double SplitStepSolver::spectral_tail(const std::vector<Complex>& values) {
  std::vector<Complex> spec = values;
  plan_.forward(spec);
  double all = 0.0;
  double tail = 0.0;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const double w = std::norm(spec[i]);
    all += w;
    if (outer_band_[i]) tail += w;
  }
  return all > 0.0 ? tail / all : 0.0;
}

WaveField split_step_evolve(const WaveField& psi0, const SplitStepConfig& cfg, double t_final) {
  if (psi0.representation != Representation::Position) throw InvalidArgument("split-step needs a position field");
  if (!(psi0.grid == cfg.grid)) throw GridMismatch("initial field does not live on the solver grid");
  const std::size_t steps = step_count(t_final, cfg.tau);
  SplitStepSolver solver(cfg);
  WaveField out = psi0;
  solver.advance(out.values, steps);
  out.time = psi0.time + t_final;
  const double tail = solver.spectral_tail(out.values);
  if (tail > cfg.spectral_tail_tolerance) {
    throw GridMismatch("grid too coarse: spectral tail " + std::to_string(tail) + " exceeds tolerance");
  }
  return out;
}

GridEnergies grid_energies(const WaveField& psi, const SeparableHamiltonian& H) {
  if (psi.representation != Representation::Position) throw InvalidArgument("grid energies need a position field");
  const auto& g = psi.grid;
  if (H.dim() != g.d) throw InvalidArgument("Hamiltonian dimension does not match the grid");
  const double dv = g.cell_volume();
  const double eps = psi.epsilon;
  const std::size_t total = g.size();
  std::vector<Complex> spec = psi.values;
  FftPlan(g.d, g.n).forward(spec);
  std::vector<std::size_t> idx(static_cast<std::size_t>(g.d));
  std::vector<double> x(static_cast<std::size_t>(g.d));
  GridEnergies e;
  for (std::size_t flat = 0; flat < total; ++flat) {
    unflatten(flat, g.n, idx);
    double k2 = 0.0;
    for (int a = 0; a < g.d; ++a) {
      x[a] = g.coordinate(a, idx[a]);
      const double k = 2.0 * std::numbers::pi * static_cast<double>(signed_frequency(idx[a], g.n)) /
                       (g.upper[a] - g.lower[a]);
      k2 += k * k;
    }
    const double w = std::norm(psi.values[flat]) * dv;
    e.norm += w;
    e.potential += H.potential(x) * w;
    e.kinetic += 0.5 * eps * eps * k2 * std::norm(spec[flat]) * dv / static_cast<double>(total);
  }
  e.total = e.kinetic + e.potential;
  return e;
}

LscIvrSeries lsc_ivr_expectation(const PhasePoint& z0, double eps, const SeparableHamiltonian& H,
                                 std::span<const ObservableKind> observables, const IntegratorSpec& spec,
                                 std::size_t samples, std::span<const double> times,
                                 const LscIvrOptions& options) {
  if (!(eps > 0.0)) throw InvalidArgument("epsilon must be positive");
  if (samples == 0) throw InvalidArgument("LSC-IVR needs at least one sample");
  if (H.dim() != z0.dim()) throw InvalidArgument("Hamiltonian dimension does not match z0");
  spec.validate();
  const int d = z0.dim();
  const auto width = 2 * static_cast<std::size_t>(d);
  const std::size_t nobs = observables.size();
  const std::size_t ntimes = times.size();

  std::vector<std::size_t> at_step(ntimes);
  for (std::size_t k = 0; k < ntimes; ++k) {
    at_step[k] = times[k] == 0.0 ? 0 : step_count(times[k], spec.tau);
  }
  const std::size_t last = ntimes ? *std::max_element(at_step.begin(), at_step.end()) : 0;

  // Wigner-density nodes, standard normals scaled by sqrt(eps/2).
  std::vector<double> nodes(samples * width);
  const double scale = std::sqrt(0.5 * eps);
  if (options.sampler == Sampler::QuasiMonteCarlo) {
    const HaltonSequence halton(width);
    for (std::size_t m = 0; m < samples; ++m) {
      std::span<double> row(nodes.data() + m * width, width);
      halton.point(m + 1, row);
      for (double& v : row) v = inverse_normal_cdf(v);
    }
  } else {
    NormalStream normals(options.seed);
    for (double& v : nodes) v = normals.next();
  }
  for (std::size_t m = 0; m < samples; ++m) {
    for (std::size_t k = 0; k < width; ++k) nodes[m * width + k] = z0.flat()[k] + scale * nodes[m * width + k];
  }

  constexpr std::size_t kChunk = 256;
  const std::size_t chunks = (samples + kChunk - 1) / kChunk;
  const std::size_t slots = ntimes * nobs;
  std::vector<std::vector<double>> sums(chunks, std::vector<double>(slots, 0.0));
  std::vector<std::vector<double>> squares(chunks, std::vector<double>(slots, 0.0));
  parallel_for(chunks, resolve_workers(options.workers), [&](std::size_t c) {
    std::vector<double> grad(static_cast<std::size_t>(d));
    auto& s = sums[c];
    auto& s2 = squares[c];
    const std::size_t end = std::min(samples, (c + 1) * kChunk);
    for (std::size_t m = c * kChunk; m < end; ++m) {
      std::span<double> z(nodes.data() + m * width, width);
      auto record = [&](std::size_t step) {
        for (std::size_t k = 0; k < ntimes; ++k) {
          if (at_step[k] != step) continue;
          for (std::size_t j = 0; j < nobs; ++j) {
            const double a = observables[j].symbol(z);
            s[k * nobs + j] += a;
            s2[k * nobs + j] += a * a;
          }
        }
      };
      record(0);
      for (std::size_t step = 1; step <= last; ++step) {
        composition_flow_step(z, spec, H, grad);
        record(step);
      }
    }
  });

  LscIvrSeries out;
  out.times.assign(times.begin(), times.end());
  out.values.assign(ntimes, std::vector<double>(nobs, 0.0));
  out.standard_error.assign(ntimes, std::vector<double>(nobs, 0.0));
  const double n = static_cast<double>(samples);
  for (std::size_t k = 0; k < ntimes; ++k) {
    for (std::size_t j = 0; j < nobs; ++j) {
      double s = 0.0;
      double s2 = 0.0;
      for (std::size_t c = 0; c < chunks; ++c) {
        s += sums[c][k * nobs + j];
        s2 += squares[c][k * nobs + j];
      }
      const double mean = s / n;
      const double var = samples > 1 ? std::max(0.0, (s2 - n * mean * mean) / (n - 1.0)) : 0.0;
      out.values[k][j] = mean;
      out.standard_error[k][j] = std::sqrt(var / n);
    }
  }
  return out;
}

}  // namespace hk
