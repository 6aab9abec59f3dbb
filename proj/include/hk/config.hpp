#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "hk/sampling.hpp"

namespace hk {

enum class ExperimentKind {
  InitialSampling,
  HarmonicLongtime,
  TorsionalWavefunction,
  TimestepStudy,
  TorsionalExpectation,
  HenonHeilesExpectation,
};

std::string_view to_string(ExperimentKind k);
ExperimentKind parse_experiment_kind(std::string_view s);

/// Declarative description of one experiment. See docs/formats.md for the INI schema.
struct ExperimentConfig {
  // [experiment]
  ExperimentKind kind = ExperimentKind::InitialSampling;
  std::string output_dir = "runs/out";
  std::uint64_t seed = 1;
  unsigned workers = 0;
  bool write_fields = false;
  bool write_ensembles = false;

  // [physics]
  int dimension = 1;
  std::vector<double> epsilons{0.1};
  std::vector<double> q0{1.0};
  std::vector<double> p0{0.0};
  std::string potential = "harmonic";
  double sigma = 0.0;

  // [sampling]
  Sampler sampler = Sampler::QuasiMonteCarlo;
  std::vector<std::size_t> samples{1024};
  std::size_t repetitions = 1;

  // [integrator]
  std::vector<int> orders{4};
  std::vector<double> taus{0.05};
  double t_final = 1.0;
  std::size_t snapshot_stride = 1;
  bool drop_escaped = false;

  // [grid]
  bool grid_auto = true;
  double grid_half_width = 14.0;  ///< in units of sqrt(eps), for the auto box
  std::vector<double> grid_lower;
  std::vector<double> grid_upper;
  std::size_t grid_n = 256;
  bool grid_periodic = false;
  bool cutoff = false;

  // [reference]
  double reference_tau = 1e-3;
  std::size_t reference_samples = 65536;
  Sampler reference_sampler = Sampler::QuasiMonteCarlo;

  /// Throws ConfigError naming the offending field.
  void validate() const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

ExperimentConfig parse_config(std::istream& in, const std::string& source = "<config>");
ExperimentConfig load_config(const std::string& path);
/// INI text that parses back to an equal config.
std::string to_ini(const ExperimentConfig& cfg);

}  // namespace hk
