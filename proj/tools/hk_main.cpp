#include <CLI11.hpp>

#include <iostream>
#include <optional>

#include "hk/config.hpp"
#include "hk/error.hpp"
#include "hk/experiment.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<std::string> output_dir;

  void apply(hk::ExperimentConfig& c) const {
    if (seed) c.seed = *seed;
    if (workers) c.workers = *workers;
    if (output_dir) c.output_dir = *output_dir;
  }
};

hk::ExperimentConfig resolve(const std::string& config_path, const std::string& preset, const Overrides& o) {
  if (config_path.empty() == preset.empty()) {
    throw hk::ConfigError("give exactly one of a config file or --preset");
  }
  hk::ExperimentConfig c = preset.empty() ? hk::load_config(config_path) : hk::find_preset(preset).config;
  o.apply(c);
  c.validate();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Herman-Kluk semiclassical propagation experiments"};
  app.require_subcommand(1);

  Overrides overrides;
  std::string config_path;
  std::string preset_name;
  bool quiet = false;
  bool plot = true;

  auto* run = app.add_subcommand("run", "run an experiment from a config file or preset");
  run->add_option("config", config_path, "INI config file");
  run->add_option("--preset", preset_name, "built-in preset name");
  run->add_option("--seed", overrides.seed, "override experiment.seed");
  run->add_option("--workers", overrides.workers, "override experiment.workers (0 = all cores)");
  run->add_option("--output-dir", overrides.output_dir, "override experiment.output_dir");
  run->add_flag("--quiet", quiet, "suppress progress output");
  run->add_flag("!--no-plotdata", plot, "skip the plotdata tables");

  auto* validate = app.add_subcommand("validate", "check a config file and print the resolved form");
  validate->add_option("config", config_path, "INI config file");
  validate->add_option("--preset", preset_name, "built-in preset name");
  validate->add_option("--seed", overrides.seed);
  validate->add_option("--workers", overrides.workers);
  validate->add_option("--output-dir", overrides.output_dir);

  auto* presets = app.add_subcommand("presets", "list or show built-in presets");
  presets->require_subcommand(1);
  auto* list = presets->add_subcommand("list", "list preset names");
  std::string show_name;
  auto* show = presets->add_subcommand("show", "print a preset as INI");
  show->add_option("name", show_name)->required();

  std::string plot_dir;
  auto* plotdata = app.add_subcommand("plotdata", "pivot run artifacts into plotdata/*.csv");
  plotdata->add_option("run_dir", plot_dir)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*run) {
      const hk::ExperimentConfig cfg = resolve(config_path, preset_name, overrides);
      hk::RunOptions options;
      options.log = quiet ? nullptr : &std::cerr;
      const auto result = hk::run_experiment(cfg, options);
      if (plot) {
        for (const auto& f : hk::emit_plotdata(cfg.output_dir)) std::cerr << "wrote " << f << '\n';
      }
      std::cout << cfg.output_dir << '\n';
      std::cerr << "finished in " << result.wall_seconds << " s\n";
    } else if (*validate) {
      std::cout << hk::to_ini(resolve(config_path, preset_name, overrides));
    } else if (*list) {
      for (const auto& p : hk::presets()) std::cout << p.name << "\t" << p.description << '\n';
    } else if (*show) {
      std::cout << hk::to_ini(hk::find_preset(show_name).config);
    } else if (*plotdata) {
      for (const auto& f : hk::emit_plotdata(plot_dir)) std::cout << f << '\n';
    }
  } catch (const hk::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kOk;
}
