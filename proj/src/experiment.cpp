#include "hk/experiment.hpp"

#include <fftw3.h>

#include <Eigen/Core>
#include <boost/version.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>

#include "hk/ensemble_io.hpp"
#include "hk/error.hpp"
#include "hk/hamiltonian.hpp"
#include "hk/integrator.hpp"
#include "hk/observables.hpp"
#include "hk/propagation.hpp"
#include "hk/reference.hpp"
#include "hk/sampling.hpp"
#include "hk/synthesis.hpp"

namespace hk {

namespace fs = std::filesystem;

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

struct Context {
  const ExperimentConfig& cfg;
  const RunOptions& options;
  ExperimentResult& result;

  template <class... Args>
  void log(const Args&... args) const {
    if (!options.log) return;
    ((*options.log) << ... << args) << std::endl;
  }

  PropagationOptions propagation(double t_final, std::size_t stride) const {
    PropagationOptions p;
    p.t_final = t_final;
    p.snapshot_stride = stride;
    p.workers = cfg.workers;
    p.escape = cfg.drop_escaped ? EscapePolicy::DropAndRenormalise : EscapePolicy::Abort;
    return p;
  }

  SynthesisOptions synthesis() const {
    SynthesisOptions s;
    s.cutoff = cfg.cutoff;
    s.workers = cfg.workers;
    return s;
  }

  bool artifacts() const { return options.write_artifacts; }
};

PhasePoint initial_point(const ExperimentConfig& cfg) { return PhasePoint(cfg.q0, cfg.p0); }

SamplePlan plan_for(const ExperimentConfig& cfg, const FbiDecomposition& dec, std::size_t m, std::uint64_t seed) {
  return cfg.sampler == Sampler::MonteCarlo ? sample_mc(dec, m, seed) : sample_qmc(dec, m);
}

/// Series label built from the parameters that vary in this run.
std::string series_label(const ExperimentConfig& cfg, double eps, std::size_t m, int order, double tau) {
  std::string s = "eps" + eps_label(eps);
  if (cfg.samples.size() > 1) s += "_M" + std::to_string(m);
  if (cfg.orders.size() > 1) s += "_order" + std::to_string(order);
  if (cfg.taus.size() > 1 && cfg.kind != ExperimentKind::TimestepStudy) s += "_tau" + short_num(tau);
  return s;
}

std::string file_safe(std::string s) {
  for (auto& c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_' && c != '.') c = '_';
  }
  return s;
}

void dump_field(const Context& ctx, const WaveField& f, const std::string& series) {
  if (!ctx.cfg.write_fields || !ctx.artifacts()) return;
  const fs::path dir = fs::path(ctx.cfg.output_dir) / "fields";
  fs::create_directories(dir);
  const std::string stem = file_safe(series + "_t" + short_num(f.time));
  write_wavefield((dir / (stem + ".hkwf")).string(), f);
  std::ofstream csv(dir / (stem + ".csv"));
  write_wavefield_slice_csv(csv, f);
}

/// Streams ensembles to disk when requested, otherwise does nothing.
class EnsembleDump {
 public:
  EnsembleDump(const Context& ctx, const std::string& series) {
    if (ctx.cfg.write_ensembles && ctx.artifacts()) {
      const fs::path dir = fs::path(ctx.cfg.output_dir) / "ensembles";
      fs::create_directories(dir);
      path_ = (dir / (file_safe(series) + ".hkens")).string();
    }
  }
  void operator()(const HKEnsemble& e) {
    if (path_.empty()) return;
    if (!writer_) writer_ = std::make_unique<EnsembleWriter>(path_, e);
    writer_->write(e);
  }

 private:
  std::string path_;
  std::unique_ptr<EnsembleWriter> writer_;
};

// -- experiments ------------------------------------------------------------

void run_initial_sampling(Context& ctx) {
  const auto& cfg = ctx.cfg;
  std::vector<std::size_t> ms = cfg.samples;
  std::sort(ms.begin(), ms.end());
  ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
  const std::size_t m_max = ms.back();
  const SeparableHamiltonian H = make_hamiltonian(cfg.potential, cfg.dimension, cfg.sigma);
  const IntegratorSpec spec = IntegratorSpec::make(cfg.orders[0], cfg.taus[0]);

  for (std::size_t ie = 0; ie < cfg.epsilons.size(); ++ie) {
    const double eps = cfg.epsilons[ie];
    const GridSpec grid = experiment_grid(cfg, eps);
    const WaveField exact = packet_on_grid(GaussianPacket(initial_point(cfg), eps), grid);
    const auto dec = decompose_gaussian_initial(initial_point(cfg), eps);
    std::vector<double> sums(ms.size(), 0.0);
    for (std::size_t k = 0; k < cfg.repetitions; ++k) {
      const std::uint64_t seed = cfg.seed + 1000 * ie + k;
      ctx.log("initial_sampling eps=", eps, " repetition ", k, " seed ", seed);
      const SamplePlan plan = plan_for(cfg, dec, m_max, seed);
      const HKEnsemble e0 = propagate_plan(plan, spec, H, ctx.propagation(0.0, 1)).front();
      GaussianAccumulator acc(grid, eps, Representation::Position, ctx.synthesis());
      std::size_t done = 0;
      for (std::size_t i = 0; i < ms.size(); ++i) {
        acc.add(e0, done, ms[i]);
        done = ms[i];
        sums[i] += l2_error(acc.result(0.0), exact);
      }
      if (k + 1 == cfg.repetitions) dump_field(ctx, acc.result(0.0), "eps" + eps_label(eps));
    }
    for (std::size_t i = 0; i < ms.size(); ++i) {
      ctx.result.errors.push_back({"eps" + eps_label(eps), eps, ms[i], spec.order, spec.tau,
                                   static_cast<double>(ms[i]), sums[i] / static_cast<double>(cfg.repetitions)});
    }
  }
}

/// Position-space reference fields for the wave-function experiments.
class ReferenceTrack {
 public:
  ReferenceTrack(const ExperimentConfig& cfg, double eps, const GridSpec& grid, const WaveField& psi0,
                 const SeparableHamiltonian& H)
      : tau_(cfg.reference_tau),
        solver_(SplitStepConfig{grid, cfg.reference_tau, H, eps, 1e-8}),
        current_(psi0) {}

  /// Field at time t; times must be requested in non-decreasing order.
  const WaveField& at(double t) {
    const auto target = static_cast<std::size_t>(std::llround(t / tau_));
    if (target < step_) throw InvalidArgument("reference times must be non-decreasing");
    solver_.advance(current_.values, target - step_);
    step_ = target;
    current_.time = t;
    return current_;
  }

  double spectral_tail() { return solver_.spectral_tail(current_.values); }

 private:
  double tau_;
  SplitStepSolver solver_;
  WaveField current_;
  std::size_t step_ = 0;
};

void run_harmonic(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const SeparableHamiltonian H = harmonic_potential(1);
  for (std::size_t ie = 0; ie < cfg.epsilons.size(); ++ie) {
    const double eps = cfg.epsilons[ie];
    const GridSpec grid = experiment_grid(cfg, eps);
    const auto dec = decompose_gaussian_initial(initial_point(cfg), eps);
    for (std::size_t m : cfg.samples) {
      const SamplePlan plan = plan_for(cfg, dec, m, cfg.seed + 1000 * ie);
      for (int order : cfg.orders) {
        for (double tau : cfg.taus) {
          const IntegratorSpec spec = IntegratorSpec::make(order, tau);
          const std::string series = series_label(cfg, eps, m, order, tau);
          ctx.log("harmonic_longtime ", series);
          EnsembleDump dump(ctx, series);
          WaveField last;
          propagate_plan(plan, spec, H, ctx.propagation(cfg.t_final, cfg.snapshot_stride), [&](const HKEnsemble& e) {
            dump(e);
            last = synthesize(e, grid, ctx.synthesis());
            const WaveField exact = analytic_harmonic(cfg.q0[0], cfg.p0[0], eps, e.t, grid);
            ctx.result.errors.push_back({series, eps, m, order, tau, e.t, l2_error(last, exact)});
          });
          dump_field(ctx, last, series);
        }
      }
    }
  }
}

void run_torsional_wavefunction(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const SeparableHamiltonian H = make_hamiltonian(cfg.potential, cfg.dimension, cfg.sigma);
  for (std::size_t ie = 0; ie < cfg.epsilons.size(); ++ie) {
    const double eps = cfg.epsilons[ie];
    const GridSpec grid = experiment_grid(cfg, eps);
    const WaveField psi0 = packet_on_grid(GaussianPacket(initial_point(cfg), eps), grid);
    const auto dec = decompose_gaussian_initial(initial_point(cfg), eps);
    for (double tau : cfg.taus) {
      // Reference fields at every snapshot time, shared by all M and orders.
      ctx.log("split-step reference eps=", eps, " tau=", tau);
      const auto marks = snapshot_steps(step_count(cfg.t_final, tau), cfg.snapshot_stride);
      std::map<std::size_t, WaveField> refs;
      ReferenceTrack track(cfg, eps, grid, psi0, H);
      for (std::size_t k : marks) refs.emplace(k, track.at(static_cast<double>(k) * tau));
      if (track.spectral_tail() > 1e-8) throw GridMismatch("grid too coarse for the split-step reference");

      for (std::size_t m : cfg.samples) {
        const SamplePlan plan = plan_for(cfg, dec, m, cfg.seed + 1000 * ie);
        for (int order : cfg.orders) {
          const IntegratorSpec spec = IntegratorSpec::make(order, tau);
          const std::string series = series_label(cfg, eps, m, order, tau);
          ctx.log("torsional_wavefunction ", series);
          EnsembleDump dump(ctx, series);
          WaveField last;
          propagate_plan(plan, spec, H, ctx.propagation(cfg.t_final, cfg.snapshot_stride), [&](const HKEnsemble& e) {
            dump(e);
            last = synthesize(e, grid, ctx.synthesis());
            const auto step = static_cast<std::size_t>(std::llround(e.t / tau));
            ctx.result.errors.push_back({series, eps, m, order, tau, e.t, l2_error(last, refs.at(step))});
          });
          dump_field(ctx, last, series);
        }
      }
    }
  }
}

void run_timestep_study(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const SeparableHamiltonian H = make_hamiltonian(cfg.potential, cfg.dimension, cfg.sigma);
  for (std::size_t ie = 0; ie < cfg.epsilons.size(); ++ie) {
    const double eps = cfg.epsilons[ie];
    const GridSpec grid = experiment_grid(cfg, eps);
    const WaveField psi0 = packet_on_grid(GaussianPacket(initial_point(cfg), eps), grid);
    const auto dec = decompose_gaussian_initial(initial_point(cfg), eps);
    ctx.log("split-step reference eps=", eps, " T=", cfg.t_final);
    ReferenceTrack track(cfg, eps, grid, psi0, H);
    const WaveField ref = track.at(cfg.t_final);
    if (track.spectral_tail() > 1e-8) throw GridMismatch("grid too coarse for the split-step reference");

    for (std::size_t m : cfg.samples) {
      const SamplePlan plan = plan_for(cfg, dec, m, cfg.seed + 1000 * ie);
      std::string base = "eps" + eps_label(eps);
      if (cfg.samples.size() > 1) base += "_M" + std::to_string(m);
      bool initial_done = false;
      for (int order : cfg.orders) {
        const std::string series = base + "_order" + std::to_string(order);
        for (double tau : cfg.taus) {
          const IntegratorSpec spec = IntegratorSpec::make(order, tau);
          ctx.log("timestep_study ", series, " tau=", tau);
          const std::size_t steps = step_count(cfg.t_final, tau);
          propagate_plan(plan, spec, H, ctx.propagation(cfg.t_final, std::max<std::size_t>(steps, 1)),
                         [&](const HKEnsemble& e) {
                           if (e.t == 0.0 && steps > 0) {
                             if (!initial_done) {
                               const WaveField f = synthesize(e, grid, ctx.synthesis());
                               ctx.result.errors.push_back({base + "_initial", eps, m, 0, 0.0, 0.0, l2_error(f, psi0)});
                               initial_done = true;
                             }
                             return;
                           }
                           const WaveField f = synthesize(e, grid, ctx.synthesis());
                           ctx.result.errors.push_back({series, eps, m, order, tau, tau, l2_error(f, ref)});
                         });
        }
      }
    }
  }
}

void run_expectation(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const double eps = cfg.epsilons[0];
  const std::size_t m = cfg.samples[0];
  const SeparableHamiltonian H = make_hamiltonian(cfg.potential, cfg.dimension, cfg.sigma);
  const IntegratorSpec spec = IntegratorSpec::make(cfg.orders[0], cfg.taus[0]);
  const PhasePoint z0 = initial_point(cfg);
  const auto dec = decompose_gaussian_initial(z0, eps);

  ctx.log(to_string(cfg.kind), ": sampling ", m, " pairs");
  const SamplePlan plan = sample_pairs(dec, m, cfg.sampler, cfg.seed);
  EnsembleDump dump(ctx, "pairs");
  std::vector<double> times;
  propagate_plan(plan, spec, H, ctx.propagation(cfg.t_final, cfg.snapshot_stride), [&](const HKEnsemble& e) {
    dump(e);
    const EnergySnapshot s = energies(e, H, cfg.workers);
    ctx.result.energies.push_back({s.t, s.kinetic, s.potential, s.total, s.norm, s.imag_residue});
    times.push_back(e.t);
    ctx.log("t=", s.t, " E_kin=", s.kinetic, " E_pot=", s.potential, " E_tot=", s.total, " norm=", s.norm);
  });

  if (cfg.kind == ExperimentKind::TorsionalExpectation) {
    const GridSpec grid = experiment_grid(cfg, eps);
    const WaveField psi0 = packet_on_grid(GaussianPacket(z0, eps), grid);
    ReferenceTrack track(cfg, eps, grid, psi0, H);
    for (double t : times) {
      const GridEnergies g = grid_energies(track.at(t), H);
      ctx.result.reference.push_back({t, g.kinetic, g.potential, g.total, 0.0, 0.0});
    }
    if (track.spectral_tail() > 1e-8) throw GridMismatch("grid too coarse for the split-step reference");
  } else {
    ctx.log("LSC-IVR reference with ", cfg.reference_samples, " samples");
    const ObservableKind obs[] = {ObservableKind::kinetic(), potential_observable(H)};
    LscIvrOptions lo;
    lo.sampler = cfg.reference_sampler;
    lo.seed = cfg.seed;
    lo.workers = cfg.workers;
    const LscIvrSeries ref = lsc_ivr_expectation(z0, eps, H, obs, spec, cfg.reference_samples, times, lo);
    for (std::size_t k = 0; k < times.size(); ++k) {
      const double kin = ref.values[k][0];
      const double pot = ref.values[k][1];
      ctx.result.reference.push_back({times[k], kin, pot, kin + pot, ref.standard_error[k][0], ref.standard_error[k][1]});
    }
  }
}

// -- artifacts --------------------------------------------------------------

nlohmann::json config_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["experiment"] = {{"kind", std::string(to_string(c.kind))}, {"output_dir", c.output_dir}, {"seed", c.seed},
                     {"workers", c.workers}, {"write_fields", c.write_fields}, {"write_ensembles", c.write_ensembles}};
  j["physics"] = {{"dimension", c.dimension}, {"epsilon", c.epsilons}, {"q0", c.q0}, {"p0", c.p0},
                  {"potential", c.potential}, {"sigma", c.sigma}};
  j["sampling"] = {{"sampler", std::string(to_string(c.sampler))}, {"samples", c.samples},
                   {"repetitions", c.repetitions}};
  j["integrator"] = {{"order", c.orders}, {"tau", c.taus}, {"t_final", c.t_final},
                     {"snapshot_stride", c.snapshot_stride}, {"escape", c.drop_escaped ? "drop" : "abort"}};
  j["grid"] = {{"box", c.grid_auto ? "auto" : "explicit"}, {"half_width", c.grid_half_width},
               {"lower", c.grid_lower}, {"upper", c.grid_upper}, {"n", c.grid_n},
               {"periodic", c.grid_periodic}, {"cutoff", c.cutoff}};
  j["reference"] = {{"tau", c.reference_tau}, {"samples", c.reference_samples},
                    {"sampler", std::string(to_string(c.reference_sampler))}};
  return j;
}

std::string utc_now() {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw IoError("cannot write " + p.string());
  return out;
}

}  // namespace

std::string eps_label(double epsilon) {
  const double k = std::round(std::log10(epsilon));
  if (std::abs(k) < 30 && std::pow(10.0, k) == epsilon) {
    return "1e" + std::to_string(static_cast<int>(k));
  }
  return short_num(epsilon);
}

GridSpec experiment_grid(const ExperimentConfig& cfg, double epsilon) {
  GridSpec g;
  g.d = cfg.dimension;
  g.n = cfg.grid_n;
  g.periodic.assign(static_cast<std::size_t>(g.d), cfg.grid_periodic ? 1 : 0);
  if (cfg.grid_auto) {
    const double half = cfg.grid_half_width * std::sqrt(epsilon);
    for (int k = 0; k < g.d; ++k) {
      g.lower.push_back(cfg.q0[k] - half);
      g.upper.push_back(cfg.q0[k] + half);
    }
  } else {
    g.lower = cfg.grid_lower;
    g.upper = cfg.grid_upper;
  }
  g.validate();
  return g;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
  cfg.validate();
  ExperimentResult result;
  result.config = cfg;
  Context ctx{cfg, options, result};
  if (options.write_artifacts) fs::create_directories(cfg.output_dir);
  const auto start = std::chrono::steady_clock::now();
  switch (cfg.kind) {
    case ExperimentKind::InitialSampling:
      run_initial_sampling(ctx);
      break;
    case ExperimentKind::HarmonicLongtime:
      run_harmonic(ctx);
      break;
    case ExperimentKind::TorsionalWavefunction:
      run_torsional_wavefunction(ctx);
      break;
    case ExperimentKind::TimestepStudy:
      run_timestep_study(ctx);
      break;
    case ExperimentKind::TorsionalExpectation:
    case ExperimentKind::HenonHeilesExpectation:
      run_expectation(ctx);
      break;
  }
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (options.write_artifacts) write_artifacts(result, cfg.output_dir);
  return result;
}

void write_artifacts(const ExperimentResult& result, const std::string& dir) {
  const fs::path root(dir);
  fs::create_directories(root);
  const auto& cfg = result.config;

  nlohmann::json meta;
  meta["config"] = config_json(cfg);
  meta["config_ini"] = to_ini(cfg);
  meta["wall_seconds"] = result.wall_seconds;
  meta["finished_utc"] = utc_now();
  meta["versions"] = {{"hk", "1.0.0"},
                      {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                    "." + std::to_string(EIGEN_MINOR_VERSION)},
                      {"boost", std::string(BOOST_LIB_VERSION)},
                      {"fftw", std::string(fftw_version)},
                      {"compiler", std::string(__VERSION__)}};
  meta["artifacts"] = nlohmann::json::array();

  if (!result.errors.empty()) {
    auto out = open_out(root / "errors.csv");
    out << "series,eps,M,order,tau,x,error\n";
    for (const auto& r : result.errors) {
      out << r.series << ',' << num(r.epsilon) << ',' << r.samples << ',' << r.order << ',' << num(r.tau) << ','
          << num(r.x) << ',' << num(r.error) << '\n';
    }
    meta["artifacts"].push_back("errors.csv");
  }
  if (!result.energies.empty()) {
    auto out = open_out(root / "energies.csv");
    out << "t,E_kin,E_pot,E_tot,norm,imag_residue\n";
    for (const auto& r : result.energies) {
      out << num(r.t) << ',' << num(r.kinetic) << ',' << num(r.potential) << ',' << num(r.total) << ','
          << num(r.norm) << ',' << num(r.imag_residue) << '\n';
    }
    meta["artifacts"].push_back("energies.csv");
  }
  if (!result.reference.empty()) {
    auto out = open_out(root / "reference.csv");
    out << "t,ref_kin,ref_pot,ref_tot,ref_kin_stderr,ref_pot_stderr\n";
    for (const auto& r : result.reference) {
      out << num(r.t) << ',' << num(r.kinetic) << ',' << num(r.potential) << ',' << num(r.total) << ','
          << num(r.kinetic_stderr) << ',' << num(r.potential_stderr) << '\n';
    }
    meta["artifacts"].push_back("reference.csv");
  }
  auto out = open_out(root / "run.json");
  out << meta.dump(2) << '\n';
}

}  // namespace hk
