#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hk/config.hpp"
#include "hk/grid.hpp"

namespace hk {

/// One point of an error curve. `series` identifies the curve (e.g. "eps1e-1_M2048"),
/// x is M, t or tau depending on the experiment.
struct ErrorRow {
  std::string series;
  double epsilon = 0.0;
  std::size_t samples = 0;
  int order = 0;
  double tau = 0.0;
  double x = 0.0;
  double error = 0.0;
};

struct EnergyRow {
  double t = 0.0;
  double kinetic = 0.0;
  double potential = 0.0;
  double total = 0.0;
  double norm = 0.0;
  double imag_residue = 0.0;
};

struct ReferenceRow {
  double t = 0.0;
  double kinetic = 0.0;
  double potential = 0.0;
  double total = 0.0;
  double kinetic_stderr = 0.0;
  double potential_stderr = 0.0;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<ErrorRow> errors;
  std::vector<EnergyRow> energies;
  std::vector<ReferenceRow> reference;
  double wall_seconds = 0.0;
};

struct RunOptions {
  bool write_artifacts = true;
  std::ostream* log = nullptr;
};

/// Grid used for epsilon: the explicit box, or q0 +- half_width sqrt(eps) when auto.
GridSpec experiment_grid(const ExperimentConfig& cfg, double epsilon);

/// Compact label for a parameter value: 0.1 -> "1e-1", 0.25 -> "0.25".
std::string eps_label(double epsilon);

/// sample -> propagate -> synthesize or expectation -> compare with the reference.
/// Writes errors.csv / energies.csv / reference.csv / run.json into cfg.output_dir
/// when options.write_artifacts is set.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunOptions& options = {});

void write_artifacts(const ExperimentResult& result, const std::string& dir);

/// Pivots the artifacts of a finished run into plotdata/*.csv; returns the files written.
std::vector<std::string> emit_plotdata(const std::string& run_dir);

// -- presets --------------------------------------------------------------

struct Preset {
  std::string name;
  std::string description;
  ExperimentConfig config;
};

/// Every experiment ships as "<name>.full" (full parameters) and "<name>.ci" (desk scale).
const std::vector<Preset>& presets();
/// Throws ConfigError for unknown names.
const Preset& find_preset(const std::string& name);

}  // namespace hk
