#include <cmath>
#include <numbers>

#include "hk/error.hpp"
#include "hk/experiment.hpp"

namespace hk {

namespace {

std::vector<std::size_t> powers_of_two(int from, int to) {
  std::vector<std::size_t> out;
  for (int k = from; k <= to; ++k) out.push_back(std::size_t{1} << k);
  return out;
}

ExperimentConfig base(ExperimentKind kind, const std::string& dir) {
  ExperimentConfig c;
  c.kind = kind;
  c.output_dir = "runs/" + dir;
  c.seed = 20240501;
  return c;
}

void torus_box(ExperimentConfig& c, std::size_t n) {
  c.grid_auto = false;
  c.grid_lower.assign(static_cast<std::size_t>(c.dimension), -std::numbers::pi);
  c.grid_upper.assign(static_cast<std::size_t>(c.dimension), std::numbers::pi);
  c.grid_n = n;
  c.grid_periodic = true;
}

ExperimentConfig initial_sampling(int d, std::size_t n, const std::string& dir) {
  auto c = base(ExperimentKind::InitialSampling, dir);
  c.dimension = d;
  c.epsilons = {1e-1, 1e-2, 1e-3};
  c.q0.assign(static_cast<std::size_t>(d), 0.0);
  c.q0[0] = 1.0;
  c.p0.assign(static_cast<std::size_t>(d), 0.0);
  c.sampler = Sampler::MonteCarlo;
  c.samples = powers_of_two(11, 17);
  c.repetitions = 10;
  c.orders = {2};
  c.taus = {0.1};
  c.t_final = 0.0;
  c.grid_n = n;
  return c;
}

ExperimentConfig harmonic(double t_final, std::size_t stride, const std::string& dir) {
  auto c = base(ExperimentKind::HarmonicLongtime, dir);
  c.epsilons = {1e-1, 1e-2, 1e-3};
  c.samples = {8192};
  c.orders = {4};
  c.taus = {0.05};
  c.t_final = t_final;
  c.snapshot_stride = stride;
  torus_box(c, 512);
  c.grid_periodic = false;
  return c;
}

ExperimentConfig torsional_2d(ExperimentKind kind, const std::string& dir) {
  auto c = base(kind, dir);
  c.dimension = 2;
  c.q0 = {1.0, 0.0};
  c.p0 = {0.0, 0.0};
  c.potential = "torsional";
  return c;
}

std::vector<Preset> build() {
  std::vector<Preset> p;
  p.push_back({"initial_sampling_d1.full", "Monte Carlo sampling error of the initial packet, d=1",
               initial_sampling(1, 512, "initial_sampling_d1")});
  p.push_back({"initial_sampling_d1.ci", "initial sampling, d=1, coarser grid",
               initial_sampling(1, 256, "initial_sampling_d1_ci")});
  p.push_back({"initial_sampling_d2.full", "Monte Carlo sampling error of the initial packet, d=2",
               initial_sampling(2, 256, "initial_sampling_d2")});
  p.push_back({"initial_sampling_d2.ci", "initial sampling, d=2, coarser grid",
               initial_sampling(2, 64, "initial_sampling_d2_ci")});

  p.push_back({"harmonic_longtime.full", "harmonic oscillator vs analytic solution up to T=100",
               harmonic(100.0, 20, "harmonic_longtime")});
  p.push_back({"harmonic_longtime.ci", "harmonic oscillator vs analytic solution up to T=20",
               harmonic(20.0, 1, "harmonic_longtime_ci")});

  {
    auto c = torsional_2d(ExperimentKind::TorsionalWavefunction, "torsional_wavefunction");
    c.epsilons = {1e-1, 1e-2};
    c.samples = {2048, 8192, 32768};
    c.orders = {8};
    c.taus = {0.05};
    c.t_final = 20.0;
    c.snapshot_stride = 4;
    torus_box(c, 512);
    p.push_back({"torsional_wavefunction.full", "torsional 2d wave function vs split-step Fourier", c});
    c.output_dir = "runs/torsional_wavefunction_ci";
    c.epsilons = {1e-1};
    c.samples = {2048, 8192};
    c.t_final = 5.0;
    c.snapshot_stride = 1;
    torus_box(c, 256);
    p.push_back({"torsional_wavefunction.ci", "torsional 2d wave function, eps=0.1, T=5", c});
  }

  {
    auto c = torsional_2d(ExperimentKind::TimestepStudy, "timestep_study");
    c.epsilons = {1e-1, 1e-2};
    c.samples = {8192};
    c.orders = {2, 4};
    c.taus = {0.4, 0.2, 0.1, 0.05, 0.025};
    c.t_final = 20.0;
    torus_box(c, 512);
    p.push_back({"timestep_study.full", "final-time error vs time step, M=8192", c});
    auto wide = c;
    wide.output_dir = "runs/timestep_study_m32768";
    wide.epsilons = {1e-2};
    wide.samples = {32768};
    p.push_back({"timestep_study_m32768.full", "final-time error vs time step, eps=0.01, M=32768", wide});
    c.output_dir = "runs/timestep_study_ci";
    c.epsilons = {1e-1};
    torus_box(c, 256);
    p.push_back({"timestep_study.ci", "final-time error vs time step, eps=0.1", c});
  }

  {
    auto c = torsional_2d(ExperimentKind::TorsionalExpectation, "torsional_expectation");
    c.epsilons = {1e-2};
    c.samples = {8192};
    c.orders = {4};
    c.taus = {0.25};
    c.t_final = 20.0;
    torus_box(c, 512);
    p.push_back({"torsional_expectation.full", "torsional 2d energies vs split-step Fourier", c});
    c.output_dir = "runs/torsional_expectation_ci";
    c.epsilons = {1e-1};
    c.taus = {0.05};
    c.t_final = 5.0;
    torus_box(c, 256);
    p.push_back({"torsional_expectation.ci", "torsional 2d energies, eps=0.1, T=5", c});
  }

  {
    auto c = base(ExperimentKind::HenonHeilesExpectation, "henon_heiles");
    c.dimension = 6;
    c.epsilons = {1e-2};
    c.q0.assign(6, 2.0);
    c.p0.assign(6, 0.0);
    c.potential = "henon_heiles";
    c.sigma = 1.0 / std::sqrt(80.0);
    c.samples = {std::size_t{1} << 22};
    c.orders = {4};
    c.taus = {0.01};
    c.t_final = 20.0;
    c.snapshot_stride = 20;
    c.reference_samples = std::size_t{1} << 20;
    p.push_back({"henon_heiles_expectation.full", "Henon-Heiles 6d energies vs LSC-IVR, M=2^22", c});
    c.output_dir = "runs/henon_heiles_ci";
    c.samples = {std::size_t{1} << 16};
    c.t_final = 5.0;
    c.reference_samples = std::size_t{1} << 16;
    p.push_back({"henon_heiles_expectation.ci", "Henon-Heiles 6d energies vs LSC-IVR, M=2^16, T=5", c});
  }
  for (const auto& preset : p) preset.config.validate();
  return p;
}

}  // namespace

const std::vector<Preset>& presets() {
  static const std::vector<Preset> all = build();
  return all;
}

const Preset& find_preset(const std::string& name) {
  for (const auto& p : presets()) {
    if (p.name == name) return p;
  }
  throw ConfigError("unknown preset '" + name + "' (see 'hk presets list')");
}

}  // namespace hk
