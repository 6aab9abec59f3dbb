// Acceptance checks 1-9. Prints one PASS/FAIL line per criterion, followed by
// indented detail lines. Pass criterion numbers as arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "hk/experiment.hpp"
#include "hk/integrator.hpp"
#include "hk/observables.hpp"
#include "hk/sampling.hpp"
#include "quadrature_oracle.hpp"

using namespace hk;
using std::numbers::pi;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> details;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    details.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
  void info(const std::string& what) { details.push_back("info " + what); }
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double fitted_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]) / n;
    my += std::log(y[i]) / n;
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  return sxy / sxx;
}

std::map<std::string, std::vector<ErrorRow>> by_series(const std::vector<ErrorRow>& rows) {
  std::map<std::string, std::vector<ErrorRow>> m;
  for (const auto& r : rows) m[r.series].push_back(r);
  return m;
}

ExperimentResult run_preset(const std::string& name) {
  RunOptions opt;
  opt.write_artifacts = false;
  return run_experiment(find_preset(name).config, opt);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// -- 1 ----------------------------------------------------------------------

Outcome initial_sampling() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  for (const char* name : {"initial_sampling_d1.ci", "initial_sampling_d2.ci"}) {
    const auto r = run_preset(name);
    const int d = r.config.dimension;
    const double target = std::sqrt(1.0 - std::pow(4.0, -d));
    std::map<std::size_t, std::vector<double>> at_m;
    for (const auto& [series, rows] : by_series(r.errors)) {
      std::vector<double> ms, errs;
      double logc = 0;
      for (const auto& row : rows) {
        ms.push_back(row.x);
        errs.push_back(row.error);
        logc += std::log(row.error * std::sqrt(row.x)) / rows.size();
        at_m[row.samples].push_back(row.error);
      }
      const double slope = fitted_slope(ms, errs);
      const double c = std::exp(logc);
      o.require(std::abs(slope + 0.5) <= 0.05, fmt("d=%d %s slope %.4f (-0.5 +- 0.05)", d, series.c_str(), slope));
      o.require(std::abs(c / target - 1.0) <= 0.2,
                fmt("d=%d %s prefactor %.4f vs sqrt(1-4^-d) = %.4f (ratio %.3f, 20%% allowed)", d, series.c_str(), c,
                    target, c / target));
      o.info(fmt("d=%d %s prefactor / sqrt(4^d-1) = %.3f", d, series.c_str(), c / std::sqrt(std::pow(4.0, d) - 1)));
    }
    double spread = 0;
    for (const auto& [m, v] : at_m) spread = std::max(spread, *std::max_element(v.begin(), v.end()) /
                                                                  *std::min_element(v.begin(), v.end()) - 1.0);
    o.require(spread <= 0.15, fmt("d=%d largest spread between eps curves %.1f%% (15%% allowed)", d, 100 * spread));
  }
  const double secs = seconds_since(t0);
  o.require(secs < 120, fmt("runtime %.1f s (< 120 s)", secs));
  return o;
}

// -- 2 ----------------------------------------------------------------------

Outcome harmonic_exactness() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = run_preset("harmonic_longtime.ci");
  for (const auto& [series, rows] : by_series(r.errors)) {
    const double e0 = rows.front().error;
    double worst = 0, t_worst = 0;
    for (const auto& row : rows)
      if (row.error > worst) {
        worst = row.error;
        t_worst = row.x;
      }
    o.require(worst <= 2 * e0 && rows.back().x >= 20.0 - 1e-9,
              fmt("%s max error %.4g at t=%.2f, t=0 error %.4g, ratio %.3f (<= 2)", series.c_str(), worst, t_worst,
                  e0, worst / e0));
  }
  const double secs = seconds_since(t0);
  o.require(secs < 120, fmt("runtime %.1f s (< 120 s)", secs));
  return o;
}

// -- 3 ----------------------------------------------------------------------

Outcome prefactor_branch() {
  Outcome o;
  const double tau = 0.05;
  const auto spec = IntegratorSpec::make(8, tau);
  const auto H = harmonic_potential(1);
  auto s = TrajectoryState::initial(std::vector<double>{1.0, 0.0});
  StepWorkspace ws(1);
  const auto n = static_cast<std::size_t>(std::ceil(4 * pi / tau));
  double worst = 0, worst_mod = 0, worst_step = 0;
  Complex prev = s.hk_factor();
  for (std::size_t k = 1; k <= n; ++k) {
    composition_step(s, spec, H, ws);
    const Complex u = s.hk_factor();
    worst = std::max(worst, std::abs(u - std::polar(1.0, -0.5 * k * tau)));
    worst_mod = std::max(worst_mod, std::abs(std::abs(u) - 1.0));
    worst_step = std::max(worst_step, std::abs(u - prev));
    prev = u;
  }
  o.info(fmt("order 8, tau %.2f, %zu steps to t = %.4f", tau, n, n * tau));
  o.require(worst < 1e-6, fmt("max |u - e^{-it/2}| = %.3g (< 1e-6)", worst));
  o.require(worst_step < 2 * tau, fmt("max per-step |du| = %.4g (< %.2f)", worst_step, 2 * tau));
  o.require(worst_mod < 1e-8, fmt("max ||u| - 1| = %.3g (< 1e-8)", worst_mod));
  return o;
}

// -- 4 ----------------------------------------------------------------------

struct OraclePair {
  std::vector<double> z1, z2;
  double eps;
};

std::vector<OraclePair> oracle_pairs(int d, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N(0.0, 1.0);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const double epss[] = {0.1, 0.03, 0.01};
  std::vector<OraclePair> out;
  for (int k = 0; k < 50; ++k) {
    OraclePair p{std::vector<double>(2 * d), {}, epss[k % 3]};
    for (auto& x : p.z1) x = 1.2 * N(rng);
    std::vector<double> dir(2 * d);
    double n2 = 0;
    for (auto& x : dir) {
      x = N(rng);
      n2 += x * x;
    }
    const double r = 4.0 * std::sqrt(p.eps) * U(rng) / std::sqrt(n2);
    p.z2 = p.z1;
    for (int i = 0; i < 2 * d; ++i) p.z2[i] += r * dir[i];
    out.push_back(std::move(p));
  }
  return out;
}

Outcome overlap_oracles() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  using Closed = std::function<Complex(const OraclePair&)>;
  using Oracle = std::function<Complex(const OraclePair&)>;
  auto check = [&](const char* name, int d, unsigned seed, const Closed& closed, const Oracle& oracle) {
    double worst = 0;
    for (const auto& p : oracle_pairs(d, seed)) {
      const Complex ref = oracle(p);
      worst = std::max(worst, std::abs(closed(p) - ref) / std::abs(ref));
    }
    o.require(worst < 1e-9, fmt("%-22s worst relative deviation %.2e over 50 pairs", name, worst));
  };
  auto one = [](const OraclePair& p, auto w) {
    return oracle::element_1d(p.z1[0], p.z1[1], p.z2[0], p.z2[1], p.eps, w);
  };
  check("identity", 1, 101, [](auto& p) { return overlap_identity(p.z1, p.z2, p.eps); },
        [&](auto& p) { return one(p, [](double) { return 1.0; }); });
  check("harmonic", 1, 102, [](auto& p) { return overlap_harmonic(p.z1, p.z2, p.eps); },
        [&](auto& p) { return one(p, [](double x) { return x * x / 2; }); });
  check("kinetic", 1, 103, [](auto& p) { return overlap_kinetic(p.z1, p.z2, p.eps); },
        [](auto& p) { return oracle::kinetic_1d(p.z1[0], p.z1[1], p.z2[0], p.z2[1], p.eps); });
  check("torsional", 1, 104, [](auto& p) { return overlap_torsional(p.z1, p.z2, p.eps); },
        [&](auto& p) { return one(p, [](double x) { return 1 - std::cos(x); }); });
  for (int k = 1; k <= 4; ++k) {
    const std::vector<int> alpha{k};
    check(fmt("monomial x^%d", k).c_str(), 1, 104 + k,
          [&](auto& p) { return overlap_monomial(p.z1, p.z2, p.eps, alpha); },
          [&](auto& p) { return one(p, [k](double x) { return std::pow(x, k); }); });
  }
  const double sigma = 1.0 / std::sqrt(80.0);
  check("Henon-Heiles (d=2)", 2, 110, [&](auto& p) { return overlap_henon_heiles(p.z1, p.z2, p.eps, sigma); },
        [&](auto& p) {
          return oracle::element_2d(p.z1.data(), p.z2.data(), p.eps, [&](double x, double y) {
            return (x * x + y * y) / 2 + sigma * (x * y * y - x * x * x / 3) +
                   sigma * sigma / 16 * (x * x + y * y) * (x * x + y * y);
          });
        });
  // Coincident-point value that settles the kinetic sign question.
  std::vector<double> z{0.7, -0.4};
  const Complex kin = overlap_kinetic(z, z, 0.05);
  o.require(std::abs(kin - (0.08 + 0.0125)) < 1e-14,
            fmt("kinetic at z1=z2=(0.7,-0.4), eps=0.05: %.6f = p^2/2 + eps/4", kin.real()));
  const double secs = seconds_since(t0);
  o.require(secs < 60, fmt("runtime %.1f s (< 60 s)", secs));
  return o;
}

// -- 5 ----------------------------------------------------------------------

Outcome symplectic_order() {
  Outcome o;
  const auto H = harmonic_potential(1);
  const double x0 = 1.0, xi0 = 0.3, T = 1.0;
  const double q = x0 * std::cos(T) + xi0 * std::sin(T), p = xi0 * std::cos(T) - x0 * std::sin(T);
  const double S = 0.5 * std::sin(T) * ((xi0 * xi0 - x0 * x0) * std::cos(T) - 2 * xi0 * x0 * std::sin(T));
  const std::map<int, std::vector<double>> taus{{2, {0.2, 0.1, 0.05, 0.025}},
                                                {4, {0.2, 0.1, 0.05, 0.025}},
                                                {6, {0.25, 0.2, 0.125, 0.1}},
                                                {8, {0.5, 0.25, 0.2, 0.125}}};
  for (const auto& [order, ts] : taus) {
    std::vector<double> flow, act;
    for (double tau : ts) {
      auto s = TrajectoryState::initial(std::vector<double>{x0, xi0});
      StepWorkspace ws(1);
      const auto spec = IntegratorSpec::make(order, tau);
      for (std::size_t k = 0; k < step_count(T, tau); ++k) composition_step(s, spec, H, ws);
      flow.push_back(std::hypot(s.z[0] - q, s.z[1] - p));
      act.push_back(std::abs(s.action() - S));
    }
    const double fo = fitted_slope(ts, flow), ao = fitted_slope(ts, act);
    o.require(std::abs(fo - order) <= 0.3 && std::abs(ao - order) <= 0.3,
              fmt("order %d: flow %.3f, action %.3f (tau %.3g..%.3g)", order, fo, ao, ts.front(), ts.back()));
  }
  const auto H2 = henon_heiles_potential(2, 1.0 / std::sqrt(80.0));
  for (int order : {2, 4, 6, 8}) {
    auto s = TrajectoryState::initial(std::vector<double>{1.0, -0.5, 0.2, 0.7});
    StepWorkspace ws(2);
    const auto spec = IntegratorSpec::make(order, 0.01);
    for (int k = 0; k < 1000; ++k) composition_step(s, spec, H2, ws);
    double worst = 0;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        double v = 0;
        for (int a = 0; a < 4; ++a) {
          const int b = a < 2 ? a + 2 : a - 2;
          const double jab = a < 2 ? 1.0 : -1.0;
          v += s.jacobian[a * 4 + i] * jab * s.jacobian[b * 4 + j];
        }
        const double jij = (i < 2 && j == i + 2) ? 1.0 : (i >= 2 && j == i - 2) ? -1.0 : 0.0;
        worst = std::max(worst, std::abs(v - jij));
      }
    o.require(worst < 1e-8, fmt("order %d: max |W^T J W - J| = %.2e, Henon-Heiles d=2, T=10, tau=0.01", order, worst));
  }
  return o;
}

// -- 6 ----------------------------------------------------------------------

Outcome torsional_wavefunction() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = run_preset("torsional_wavefunction.ci");
  const auto s = by_series(r.errors);
  const auto& big = s.at("eps1e-1_M8192");
  const auto& small = s.at("eps1e-1_M2048");
  double worst = 0;
  bool ordered = big.size() == small.size();
  double min_gap = 1e300;
  for (std::size_t i = 0; i < big.size(); ++i) {
    worst = std::max(worst, big[i].error);
    if (i < small.size()) {
      ordered = ordered && big[i].x == small[i].x && big[i].error < small[i].error;
      min_gap = std::min(min_gap, small[i].error - big[i].error);
    }
  }
  o.require(worst < 0.05 && big.back().x >= 5.0 - 1e-9, fmt("M=8192 max error %.4f over t in [0, %.2f] (< 0.05)", worst, big.back().x));
  o.require(ordered, fmt("M=8192 below M=2048 at all %zu times (smallest gap %.4f)", big.size(), min_gap));
  const double secs = seconds_since(t0);
  o.require(secs < 600, fmt("runtime %.1f s (< 600 s)", secs));
  return o;
}

// -- 7 ----------------------------------------------------------------------

Outcome timestep_plateau() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = run_preset("timestep_study.ci");
  const auto s = by_series(r.errors);
  if (auto it = s.find("eps1e-1_initial"); it != s.end())
    o.info(fmt("t=0 sampling error %.4f", it->second.front().error));
  std::map<int, double> entry;
  for (int order : {2, 4}) {
    const auto& rows = s.at("eps1e-1_order" + std::to_string(order));
    std::vector<double> taus, errs;
    for (const auto& row : rows) {
      taus.push_back(row.x);
      errs.push_back(row.error);
    }
    std::string line = fmt("order %d errors:", order);
    for (std::size_t i = 0; i < taus.size(); ++i) line += fmt(" %.3g@%.3g", errs[i], taus[i]);
    o.info(line);
    // Plateau: the longest tail of successive ratios err(tau_{k+1})/err(tau_k) > 0.7.
    std::size_t k0 = taus.size() - 1;
    while (k0 > 0 && errs[k0] / errs[k0 - 1] > 0.7) --k0;
    const bool flat = k0 + 1 < taus.size();
    entry[order] = flat ? taus[k0] : 0.0;
    o.require(flat, fmt("order %d flattens: plateau from tau=%.3g (last ratio %.3f > 0.7)", order, taus[k0],
                        errs.back() / errs[errs.size() - 2]));
    // Pre-plateau regime: tau_0 .. tau_k0.
    if (k0 >= 1) {
      const std::vector<double> pt(taus.begin(), taus.begin() + k0 + 1), pe(errs.begin(), errs.begin() + k0 + 1);
      const double fo = fitted_slope(pt, pe);
      o.require(fo >= order - 0.5, fmt("order %d pre-plateau fitted order %.3f over %zu points (>= %.1f)", order, fo,
                                       pt.size(), order - 0.5));
    } else {
      o.require(false, fmt("order %d has no pre-plateau regime: already flat at tau=%.3g, order not measurable", order,
                           taus[0]));
    }
  }
  o.require(entry[4] > entry[2], fmt("order 4 enters its plateau at tau=%.3g, order 2 at tau=%.3g", entry[4], entry[2]));
  o.info(fmt("runtime %.1f s", seconds_since(t0)));
  return o;
}

// -- 8 ----------------------------------------------------------------------

Outcome koksma_hlawka() {
  Outcome o;
  const auto mu = Density1d::standard_normal();
  auto run = [&](const char* name, const TestFunction1d& f, const std::vector<double>& pts) {
    const auto r = koksma_hlawka_residual_1d(f, mu, pts);
    o.require(r.residual < 1e-8, fmt("%-30s mean error %+.3e, discrepancy side %+.3e, residual %.2e", name,
                                     r.mean_error, r.discrepancy_integral, r.residual));
  };
  run("constant, 3 nodes", {[](double) { return 2.5; }, [](double) { return 0.0; }}, {-0.4, 0.2, 1.3});
  run("f(x) = x, node {0}", {[](double x) { return x; }, [](double) { return 1.0; }}, {0.0});
  std::vector<double> halton;
  for (int m = 1; m <= 64; ++m) halton.push_back(inverse_normal_cdf(radical_inverse(m, 2)));
  run("Gaussian bump, 64 Halton nodes",
      {[](double x) { return std::exp(-(x - 0.5) * (x - 0.5)); },
       [](double x) { return -2 * (x - 0.5) * std::exp(-(x - 0.5) * (x - 0.5)); }},
      halton);
  return o;
}

// -- 9 ----------------------------------------------------------------------

Outcome henon_heiles() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = run_preset("henon_heiles_expectation.ci");
  const auto& E = r.energies;
  const auto& R = r.reference;
  bool aligned = E.size() == R.size() && !E.empty();
  for (std::size_t i = 0; aligned && i < E.size(); ++i) aligned = std::abs(E[i].t - R[i].t) < 1e-9;
  o.require(aligned && E.back().t >= 5.0 - 1e-9, fmt("%zu snapshots up to t=%.2f aligned with the reference", E.size(),
                                                     E.empty() ? 0.0 : E.back().t));
  if (!aligned) return o;

  const double e0 = E.front().total;
  double drift = 0, t_drift = 0;
  for (const auto& e : E)
    if (std::abs(e.total - e0) / std::abs(e0) > drift) {
      drift = std::abs(e.total - e0) / std::abs(e0);
      t_drift = e.t;
    }
  o.require(drift < 0.01, fmt("total energy drift %.2f%% at t=%.2f (E_tot(0) = %.4f, < 1%%)", 100 * drift, t_drift, e0));

  // Deviation of each curve relative to the magnitude of its reference curve.
  auto curve_error = [&](auto hk, auto ref) {
    double scale = 0, worst = 0, pointwise = 0;
    for (std::size_t i = 0; i < E.size(); ++i) scale = std::max(scale, std::abs(ref(R[i])));
    for (std::size_t i = 0; i < E.size(); ++i) {
      worst = std::max(worst, std::abs(hk(E[i]) - ref(R[i])) / scale);
      pointwise = std::max(pointwise, std::abs(hk(E[i]) - ref(R[i])) / std::abs(ref(R[i])));
    }
    return std::pair{worst, pointwise};
  };
  const auto [kin, kin_pt] = curve_error([](const EnergyRow& e) { return e.kinetic; },
                                         [](const ReferenceRow& e) { return e.kinetic; });
  const auto [pot, pot_pt] = curve_error([](const EnergyRow& e) { return e.potential; },
                                         [](const ReferenceRow& e) { return e.potential; });
  o.require(kin < 0.05, fmt("kinetic vs LSC-IVR: max deviation %.2f%% of the reference curve scale (< 5%%)", 100 * kin));
  o.require(pot < 0.05, fmt("potential vs LSC-IVR: max deviation %.2f%% of the reference curve scale (< 5%%)", 100 * pot));
  o.info(fmt("pointwise relative deviation: kinetic %.1f%%, potential %.1f%%", 100 * kin_pt, 100 * pot_pt));

  double nmin = 1e300, nmax = 0, resid = 0;
  for (const auto& e : E) {
    nmin = std::min(nmin, e.norm);
    nmax = std::max(nmax, e.norm);
    resid = std::max(resid, e.imag_residue);
  }
  o.info(fmt("estimated norm A_M[1] in [%.4f, %.4f], largest imaginary residue %.3g", nmin, nmax, resid));
  // Diagnostic only: energies divided by the estimated norm.
  double ndrift = 0, nkin = 0, npot = 0, kscale = 0, pscale = 0;
  for (const auto& x : R) {
    kscale = std::max(kscale, std::abs(x.kinetic));
    pscale = std::max(pscale, std::abs(x.potential));
  }
  const double ne0 = E.front().total / E.front().norm;
  for (std::size_t i = 0; i < E.size(); ++i) {
    ndrift = std::max(ndrift, std::abs(E[i].total / E[i].norm - ne0) / std::abs(ne0));
    nkin = std::max(nkin, std::abs(E[i].kinetic / E[i].norm - R[i].kinetic) / kscale);
    npot = std::max(npot, std::abs(E[i].potential / E[i].norm - R[i].potential) / pscale);
  }
  o.info(fmt("norm-divided estimator (not the criterion): drift %.2f%%, kinetic %.2f%%, potential %.2f%%", 100 * ndrift,
             100 * nkin, 100 * npot));
  const double secs = seconds_since(t0);
  o.require(secs < 600, fmt("runtime %.1f s (< 600 s)", secs));
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"initial sampling law", initial_sampling},
      {"harmonic exactness", harmonic_exactness},
      {"prefactor branch", prefactor_branch},
      {"overlap oracles", overlap_oracles},
      {"symplectic order", symplectic_order},
      {"torsional 2d vs split-step", torsional_wavefunction},
      {"time-step plateau", timestep_plateau},
      {"Koksma-Hlawka identity", koksma_hlawka},
      {"Henon-Heiles 6d energies", henon_heiles},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.details.push_back(std::string("FAIL exception: ") + e.what());
    }
    std::printf("%s %d %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, criteria[k].first, seconds_since(t0));
    for (const auto& d : o.details) std::printf("    %s\n", d.c_str());
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
