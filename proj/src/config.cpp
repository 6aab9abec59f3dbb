#include "hk/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "hk/error.hpp"
#include "hk/hamiltonian.hpp"

namespace hk {

namespace {

struct KindName {
  ExperimentKind kind;
  std::string_view name;
};

constexpr KindName kKinds[] = {
    {ExperimentKind::InitialSampling, "initial_sampling"},
    {ExperimentKind::HarmonicLongtime, "harmonic_longtime"},
    {ExperimentKind::TorsionalWavefunction, "torsional_wavefunction"},
    {ExperimentKind::TimestepStudy, "timestep_study"},
    {ExperimentKind::TorsionalExpectation, "torsional_expectation"},
    {ExperimentKind::HenonHeilesExpectation, "henon_heiles_expectation"},
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T, class F>
std::string join(const std::vector<T>& v, F f) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += f(v[i]);
  }
  return out;
}

/// Reads keys from one section and records which keys were consumed.
class Section {
 public:
  Section(const boost::property_tree::ptree* tree, std::string name)
      : tree_(tree), name_(std::move(name)) {}

  bool has(const std::string& key) const { return tree_ && tree_->get_child_optional(key); }

  std::string raw(const std::string& key) {
    used_.insert(key);
    return trim(tree_->get<std::string>(key));
  }

  std::string field(const std::string& key) const { return name_ + "." + key; }

  double real(const std::string& key, double fallback) {
    return has(key) ? parse_real(raw(key), field(key)) : fallback;
  }
  std::uint64_t integer(const std::string& key, std::uint64_t fallback) {
    return has(key) ? parse_integer(raw(key), field(key)) : fallback;
  }
  bool flag(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const std::string v = raw(key);
    if (v == "true" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "no" || v == "0") return false;
    throw ConfigError(field(key) + ": expected true or false, got '" + v + "'");
  }
  std::string text(const std::string& key, const std::string& fallback) {
    return has(key) ? raw(key) : fallback;
  }
  std::vector<double> reals(const std::string& key, std::vector<double> fallback) {
    if (!has(key)) return fallback;
    std::vector<double> out;
    for (const auto& item : split_list(raw(key))) out.push_back(parse_real(item, field(key)));
    return out;
  }
  std::vector<std::uint64_t> integers(const std::string& key, std::vector<std::uint64_t> fallback) {
    if (!has(key)) return fallback;
    std::vector<std::uint64_t> out;
    for (const auto& item : split_list(raw(key))) out.push_back(parse_integer(item, field(key)));
    return out;
  }

  void reject_unknown() const {
    if (!tree_) return;
    for (const auto& [key, value] : *tree_) {
      if (!used_.count(key)) throw ConfigError(field(key) + ": unknown key");
    }
  }

  static double parse_real(const std::string& s, const std::string& field) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v)) {
      throw ConfigError(field + ": '" + s + "' is not a finite number");
    }
    return v;
  }

  /// Accepts plain integers and powers written as b^e.
  static std::uint64_t parse_integer(const std::string& s, const std::string& field) {
    const auto caret = s.find('^');
    if (caret != std::string::npos) {
      const std::uint64_t base = parse_integer(trim(s.substr(0, caret)), field);
      const std::uint64_t exponent = parse_integer(trim(s.substr(caret + 1)), field);
      std::uint64_t v = 1;
      for (std::uint64_t i = 0; i < exponent; ++i) {
        if (base != 0 && v > UINT64_MAX / base) throw ConfigError(field + ": '" + s + "' overflows");
        v *= base;
      }
      return v;
    }
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
      throw ConfigError(field + ": '" + s + "' is not a non-negative integer");
    }
    errno = 0;
    const auto v = std::strtoull(s.c_str(), nullptr, 10);
    if (errno == ERANGE) throw ConfigError(field + ": '" + s + "' overflows");
    return v;
  }

 private:
  const boost::property_tree::ptree* tree_;
  std::string name_;
  std::set<std::string> used_;
};

Sampler parse_sampler(const std::string& s, const std::string& field) {
  if (s == "mc") return Sampler::MonteCarlo;
  if (s == "qmc") return Sampler::QuasiMonteCarlo;
  throw ConfigError(field + ": expected mc or qmc, got '" + s + "'");
}

std::vector<double> broadcast(std::vector<double> v, int d, const std::string& field) {
  if (v.size() == 1 && d > 1) v.assign(static_cast<std::size_t>(d), v[0]);
  if (v.size() != static_cast<std::size_t>(d)) {
    throw ConfigError(field + ": expected 1 or " + std::to_string(d) + " values");
  }
  return v;
}

}  // namespace

std::string_view to_string(ExperimentKind k) {
  for (const auto& e : kKinds) {
    if (e.kind == k) return e.name;
  }
  return "unknown";
}

ExperimentKind parse_experiment_kind(std::string_view s) {
  for (const auto& e : kKinds) {
    if (e.name == s) return e.kind;
  }
  throw ConfigError("experiment.kind: unknown experiment '" + std::string(s) + "'");
}

void ExperimentConfig::validate() const {
  if (dimension < 1) throw ConfigError("physics.dimension: must be >= 1");
  if (epsilons.empty()) throw ConfigError("physics.epsilon: at least one value required");
  for (double e : epsilons) {
    if (!(e > 0.0)) throw ConfigError("physics.epsilon: must be > 0, got " + fmt(e));
  }
  const auto d = static_cast<std::size_t>(dimension);
  if (q0.size() != d) throw ConfigError("physics.q0: expected " + std::to_string(d) + " values");
  if (p0.size() != d) throw ConfigError("physics.p0: expected " + std::to_string(d) + " values");
  try {
    (void)make_hamiltonian(potential, dimension, sigma);
  } catch (const Error& e) {
    throw ConfigError(std::string("physics.potential: ") + e.what());
  }
  if (samples.empty()) throw ConfigError("sampling.samples: at least one value required");
  for (auto m : samples) {
    if (m == 0) throw ConfigError("sampling.samples: M must be >= 1");
  }
  if (repetitions == 0) throw ConfigError("sampling.repetitions: must be >= 1");
  if (orders.empty()) throw ConfigError("integrator.order: at least one value required");
  for (int o : orders) {
    if (o != 2 && o != 4 && o != 6 && o != 8) {
      throw ConfigError("integrator.order: supported orders are 2, 4, 6, 8; got " + std::to_string(o));
    }
  }
  if (taus.empty()) throw ConfigError("integrator.tau: at least one value required");
  for (double t : taus) {
    if (!(t > 0.0)) throw ConfigError("integrator.tau: must be > 0, got " + fmt(t));
  }
  if (!(t_final >= 0.0)) throw ConfigError("integrator.t_final: must be >= 0");
  for (double t : taus) {
    const double steps = t_final / t;
    if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps)) {
      throw ConfigError("integrator.t_final: " + fmt(t_final) + " is not a multiple of tau " + fmt(t));
    }
  }
  if (snapshot_stride == 0) throw ConfigError("integrator.snapshot_stride: must be >= 1");
  if (grid_n < 2) throw ConfigError("grid.n: must be >= 2");
  if (grid_auto) {
    if (!(grid_half_width > 0.0)) throw ConfigError("grid.half_width: must be > 0");
  } else {
    if (grid_lower.size() != d || grid_upper.size() != d) {
      throw ConfigError("grid.lower: bounds must have 1 or " + std::to_string(d) + " values");
    }
    for (std::size_t k = 0; k < d; ++k) {
      if (!(grid_upper[k] > grid_lower[k])) throw ConfigError("grid.upper: must exceed grid.lower");
    }
  }
  if (!(reference_tau > 0.0)) throw ConfigError("reference.tau: must be > 0");
  if (reference_samples == 0) throw ConfigError("reference.samples: must be >= 1");

  switch (kind) {
    case ExperimentKind::InitialSampling:
      if (sampler != Sampler::MonteCarlo && repetitions > 1) {
        throw ConfigError("sampling.repetitions: repetitions need sampler = mc");
      }
      break;
    case ExperimentKind::HarmonicLongtime:
      if (dimension != 1) throw ConfigError("physics.dimension: harmonic_longtime is one-dimensional");
      if (potential != "harmonic") throw ConfigError("physics.potential: harmonic_longtime needs harmonic");
      break;
    case ExperimentKind::TorsionalWavefunction:
    case ExperimentKind::TimestepStudy:
    case ExperimentKind::TorsionalExpectation:
      if (dimension > 2) throw ConfigError("physics.dimension: grid references need dimension <= 2");
      if (!grid_periodic) throw ConfigError("grid.periodic: the split-step reference needs a periodic grid");
      if ((grid_n & (grid_n - 1)) != 0) throw ConfigError("grid.n: the split-step reference needs a power of two");
      for (double t : taus) {
        const double r = t / reference_tau;
        if (std::abs(r - std::round(r)) > 1e-9 * r) {
          throw ConfigError("reference.tau: must divide integrator.tau " + fmt(t));
        }
      }
      break;
    case ExperimentKind::HenonHeilesExpectation:
      break;
  }
  if (kind == ExperimentKind::TorsionalExpectation || kind == ExperimentKind::HenonHeilesExpectation) {
    if (epsilons.size() != 1) throw ConfigError("physics.epsilon: expectation runs take a single value");
    if (samples.size() != 1) throw ConfigError("sampling.samples: expectation runs take a single value");
    if (orders.size() != 1 || taus.size() != 1) {
      throw ConfigError("integrator.order: expectation runs take a single order and tau");
    }
  }
}

ExperimentConfig parse_config(std::istream& in, const std::string& source) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(source + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  static const std::set<std::string> known{"experiment", "physics", "sampling", "integrator", "grid", "reference"};
  for (const auto& [name, child] : tree) {
    if (!known.count(name)) throw ConfigError(name + ": unknown section");
    if (child.empty() && !child.data().empty()) throw ConfigError(name + ": keys must live inside a section");
  }
  auto section = [&](const std::string& name) {
    const auto child = tree.get_child_optional(name);
    return Section(child ? &*child : nullptr, name);
  };

  ExperimentConfig c;
  Section ex = section("experiment");
  if (!ex.has("kind")) throw ConfigError("experiment.kind: missing");
  c.kind = parse_experiment_kind(ex.raw("kind"));
  c.output_dir = ex.text("output_dir", c.output_dir);
  c.seed = ex.integer("seed", c.seed);
  c.workers = static_cast<unsigned>(ex.integer("workers", c.workers));
  c.write_fields = ex.flag("write_fields", c.write_fields);
  c.write_ensembles = ex.flag("write_ensembles", c.write_ensembles);
  ex.reject_unknown();

  Section ph = section("physics");
  c.dimension = static_cast<int>(ph.integer("dimension", 1));
  c.epsilons = ph.reals("epsilon", c.epsilons);
  c.q0 = broadcast(ph.reals("q0", {1.0}), c.dimension, "physics.q0");
  c.p0 = broadcast(ph.reals("p0", {0.0}), c.dimension, "physics.p0");
  c.potential = ph.text("potential", c.potential);
  c.sigma = ph.real("sigma", c.sigma);
  ph.reject_unknown();

  Section sa = section("sampling");
  c.sampler = parse_sampler(sa.text("sampler", "qmc"), "sampling.sampler");
  {
    std::vector<std::uint64_t> def(c.samples.begin(), c.samples.end());
    const auto ms = sa.integers("samples", def);
    c.samples.assign(ms.begin(), ms.end());
  }
  c.repetitions = sa.integer("repetitions", c.repetitions);
  sa.reject_unknown();

  Section in_ = section("integrator");
  {
    const auto os = in_.integers("order", {4});
    c.orders.assign(os.begin(), os.end());
  }
  c.taus = in_.reals("tau", c.taus);
  c.t_final = in_.real("t_final", c.t_final);
  c.snapshot_stride = in_.integer("snapshot_stride", c.snapshot_stride);
  const std::string escape = in_.text("escape", "abort");
  if (escape == "abort") {
    c.drop_escaped = false;
  } else if (escape == "drop") {
    c.drop_escaped = true;
  } else {
    throw ConfigError("integrator.escape: expected abort or drop, got '" + escape + "'");
  }
  in_.reject_unknown();

  Section gr = section("grid");
  const std::string box = gr.text("box", "auto");
  if (box == "auto") {
    c.grid_auto = true;
  } else if (box == "explicit") {
    c.grid_auto = false;
  } else {
    throw ConfigError("grid.box: expected auto or explicit, got '" + box + "'");
  }
  c.grid_half_width = gr.real("half_width", c.grid_half_width);
  if (gr.has("lower") || gr.has("upper")) {
    if (c.grid_auto) throw ConfigError("grid.lower: bounds need box = explicit");
    c.grid_lower = broadcast(gr.reals("lower", {}), c.dimension, "grid.lower");
    c.grid_upper = broadcast(gr.reals("upper", {}), c.dimension, "grid.upper");
  } else if (!c.grid_auto) {
    throw ConfigError("grid.lower: box = explicit needs lower and upper");
  }
  c.grid_n = gr.integer("n", c.grid_n);
  c.grid_periodic = gr.flag("periodic", c.grid_periodic);
  c.cutoff = gr.flag("cutoff", c.cutoff);
  gr.reject_unknown();

  Section re = section("reference");
  c.reference_tau = re.real("tau", c.reference_tau);
  c.reference_samples = re.integer("samples", c.reference_samples);
  c.reference_sampler = parse_sampler(re.text("sampler", "qmc"), "reference.sampler");
  re.reject_unknown();

  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  return parse_config(in, path);
}

std::string to_ini(const ExperimentConfig& c) {
  auto real = [](double v) { return fmt(v); };
  auto whole = [](auto v) { return std::to_string(v); };
  auto flag = [](bool b) { return std::string(b ? "true" : "false"); };
  std::ostringstream os;
  os << "[experiment]\n"
     << "kind = " << to_string(c.kind) << "\n"
     << "output_dir = " << c.output_dir << "\n"
     << "seed = " << c.seed << "\n"
     << "workers = " << c.workers << "\n"
     << "write_fields = " << flag(c.write_fields) << "\n"
     << "write_ensembles = " << flag(c.write_ensembles) << "\n\n";
  os << "[physics]\n"
     << "dimension = " << c.dimension << "\n"
     << "epsilon = " << join(c.epsilons, real) << "\n"
     << "q0 = " << join(c.q0, real) << "\n"
     << "p0 = " << join(c.p0, real) << "\n"
     << "potential = " << c.potential << "\n"
     << "sigma = " << fmt(c.sigma) << "\n\n";
  os << "[sampling]\n"
     << "sampler = " << to_string(c.sampler) << "\n"
     << "samples = " << join(c.samples, whole) << "\n"
     << "repetitions = " << c.repetitions << "\n\n";
  os << "[integrator]\n"
     << "order = " << join(c.orders, whole) << "\n"
     << "tau = " << join(c.taus, real) << "\n"
     << "t_final = " << fmt(c.t_final) << "\n"
     << "snapshot_stride = " << c.snapshot_stride << "\n"
     << "escape = " << (c.drop_escaped ? "drop" : "abort") << "\n\n";
  os << "[grid]\n"
     << "box = " << (c.grid_auto ? "auto" : "explicit") << "\n"
     << "half_width = " << fmt(c.grid_half_width) << "\n";
  if (!c.grid_auto) {
    os << "lower = " << join(c.grid_lower, real) << "\n"
       << "upper = " << join(c.grid_upper, real) << "\n";
  }
  os << "n = " << c.grid_n << "\n"
     << "periodic = " << flag(c.grid_periodic) << "\n"
     << "cutoff = " << flag(c.cutoff) << "\n\n";
  os << "[reference]\n"
     << "tau = " << fmt(c.reference_tau) << "\n"
     << "samples = " << c.reference_samples << "\n"
     << "sampler = " << to_string(c.reference_sampler) << "\n";
  return os.str();
}

}  // namespace hk
