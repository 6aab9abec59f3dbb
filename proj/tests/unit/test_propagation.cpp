#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <numeric>
#include <vector>

#include "hk/ensemble_io.hpp"
#include "hk/error.hpp"
#include "hk/integrator.hpp"
#include "hk/propagation.hpp"
#include "hk/sampling.hpp"

using namespace hk;
using std::numbers::pi;

namespace {

struct HarmonicExact {
  double q, p, S;
};

HarmonicExact harmonic_exact(double x0, double xi0, double t) {
  return {x0 * std::cos(t) + xi0 * std::sin(t), xi0 * std::cos(t) - x0 * std::sin(t),
          0.5 * std::sin(t) * ((xi0 * xi0 - x0 * x0) * std::cos(t) - 2 * xi0 * x0 * std::sin(t))};
}

TrajectoryState run(std::vector<double> z0, const IntegratorSpec& spec, const SeparableHamiltonian& H,
                    double T) {
  auto s = TrajectoryState::initial(z0);
  StepWorkspace ws(s.d);
  const auto n = step_count(T, spec.tau);
  for (std::size_t k = 0; k < n; ++k) composition_step(s, spec, H, ws);
  return s;
}

double fitted_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(x[i]) / n;
    my += std::log(y[i]) / n;
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  return sxy / sxx;
}

// max |W^T J W - J|
double symplectic_defect(const TrajectoryState& s) {
  const int n = 2 * s.d;
  auto J = [&](int i, int j) {
    if (i < s.d && j == i + s.d) return 1.0;
    if (i >= s.d && j == i - s.d) return -1.0;
    return 0.0;
  };
  double worst = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double v = 0;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) v += s.jacobian[a * n + i] * J(a, b) * s.jacobian[b * n + j];
      worst = std::max(worst, std::abs(v - J(i, j)));
    }
  return worst;
}

}  // namespace

TEST_CASE("composition coefficient tables") {
  CHECK(composition_coefficients(2) == std::vector<double>{1.0});
  CHECK(composition_coefficients(4).size() == 3);
  CHECK(composition_coefficients(6).size() == 7);
  CHECK(composition_coefficients(8).size() == 15);
  const double c1 = 1.0 / (2.0 - std::cbrt(2.0));
  CHECK(composition_coefficients(4)[0] == doctest::Approx(c1).epsilon(1e-15));
  CHECK(composition_coefficients(4)[1] == doctest::Approx(1 - 2 * c1).epsilon(1e-15));
  for (int g : {2, 4, 6, 8}) {
    const auto c = composition_coefficients(g);
    CHECK(std::accumulate(c.begin(), c.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-14));
    for (std::size_t k = 0; k < c.size(); ++k) CHECK(c[k] == c[c.size() - 1 - k]);
  }
  CHECK_THROWS_AS(composition_coefficients(3), InvalidArgument);
  CHECK_THROWS_AS(IntegratorSpec::make(4, 0.0), InvalidArgument);
  CHECK_THROWS_AS(IntegratorSpec::make(4, -0.1), InvalidArgument);
}

TEST_CASE("initial trajectory state") {
  std::vector<double> z{0.5, -1.0, 2.0, 0.1};
  auto s = TrajectoryState::initial(z);
  CHECK(s.d == 2);
  CHECK(s.z == z);
  CHECK(s.action() == 0.0);
  CHECK(s.t == 0.0);
  CHECK(s.prefactor.theta == 0.0);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(s.jacobian[i * 4 + j] == (i == j ? 1.0 : 0.0));
  CHECK(s.hk_factor() == Complex(1.0, 0.0));
}

TEST_CASE("one Verlet step on the harmonic oscillator is locally third order") {
  auto H = harmonic_potential(1);
  std::vector<double> err;
  for (double h : {0.1, 0.05, 0.025}) {
    auto s = verlet_step(TrajectoryState::initial(std::vector<double>{1.0, 0.0}), h, H);
    err.push_back(std::hypot(s.z[0] - std::cos(h), s.z[1] + std::sin(h)));
  }
  CHECK(std::log2(err[0] / err[1]) == doctest::Approx(3.0).epsilon(0.03));
  CHECK(std::log2(err[1] / err[2]) == doctest::Approx(3.0).epsilon(0.03));
}

TEST_CASE("Verlet step is exact for free flight") {
  auto H = free_particle(2);
  std::vector<double> z{0.3, -0.2, 1.5, -0.5};
  const double h = 0.37;
  auto s = verlet_step(TrajectoryState::initial(z), h, H);
  CHECK(s.z[0] == doctest::Approx(0.3 + h * 1.5).epsilon(1e-15));
  CHECK(s.z[1] == doctest::Approx(-0.2 - h * 0.5).epsilon(1e-15));
  CHECK(s.z[2] == 1.5);
  CHECK(s.z[3] == -0.5);
  CHECK(s.action_kinetic == doctest::Approx(h * (1.5 * 1.5 + 0.25) / 2).epsilon(1e-15));
  CHECK(s.action_potential == 0.0);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double expected = (i == j) ? 1.0 : 0.0;
      if (i < 2 && j == i + 2) expected = h;
      CHECK(s.jacobian[i * 4 + j] == doctest::Approx(expected).epsilon(1e-15));
    }
}

TEST_CASE("Verlet step followed by its negative returns the initial state") {
  auto H = henon_heiles_potential(2, 0.3);
  std::vector<double> z{0.4, -0.7, 0.9, 0.2};
  auto s = verlet_step(verlet_step(TrajectoryState::initial(z), 0.13, H), -0.13, H);
  for (int k = 0; k < 4; ++k) CHECK(std::abs(s.z[k] - z[k]) < 1e-15);
  for (int i = 0; i < 16; ++i) CHECK(std::abs(s.jacobian[i] - (i % 5 == 0 ? 1.0 : 0.0)) < 1e-14);
  CHECK(std::abs(s.action()) < 1e-15);
}

TEST_CASE("order-2 composition is a single Verlet step") {
  auto H = torsional_potential(1);
  std::vector<double> z{0.8, 0.3};
  auto a = composition_step(TrajectoryState::initial(z), IntegratorSpec::make(2, 0.1), H);
  auto b = verlet_step(TrajectoryState::initial(z), 0.1, H);
  CHECK(a.z == b.z);
  CHECK(a.jacobian == b.jacobian);
  CHECK(a.action() == b.action());
}

TEST_CASE("observed orders of flow and action on the harmonic oscillator") {
  auto H = harmonic_potential(1);
  const double x0 = 1.0, xi0 = 0.3;
  const auto exact = harmonic_exact(x0, xi0, 1.0);
  struct Case {
    int order;
    std::vector<double> taus;
  };
  for (const auto& c : {Case{2, {0.2, 0.1, 0.05, 0.025}}, Case{4, {0.2, 0.1, 0.05, 0.025}},
                        Case{6, {0.25, 0.2, 0.125, 0.1}}, Case{8, {0.5, 0.25, 0.2, 0.125}}}) {
    CAPTURE(c.order);
    std::vector<double> flow, act;
    for (double tau : c.taus) {
      auto s = run({x0, xi0}, IntegratorSpec::make(c.order, tau), H, 1.0);
      flow.push_back(std::hypot(s.z[0] - exact.q, s.z[1] - exact.p));
      act.push_back(std::abs(s.action() - exact.S));
    }
    CHECK(std::abs(fitted_slope(c.taus, flow) - c.order) < 0.3);
    CHECK(std::abs(fitted_slope(c.taus, act) - c.order) < 0.3);
  }
}

TEST_CASE("harmonic quarter period") {
  auto H = harmonic_potential(1);
  const double tau = pi / 2 / 157;
  auto s = run({1.0, 0.0}, IntegratorSpec::make(4, tau), H, 157 * tau);
  CHECK(std::abs(s.z[0]) < 1e-6);
  CHECK(std::abs(s.z[1] + 1.0) < 1e-6);
  CHECK(std::abs(s.action()) < 1e-6);
}

TEST_CASE("energy is nearly conserved on the torsional potential") {
  auto H = torsional_potential(2);
  std::vector<double> z{1.0, 0.0, 0.0, 0.5};
  auto s = TrajectoryState::initial(z);
  StepWorkspace ws(2);
  auto spec = IntegratorSpec::make(4, 0.01);
  const double e0 = H.energy(z);
  double worst = 0;
  for (int k = 0; k < 1000; ++k) {
    composition_step(s, spec, H, ws);
    worst = std::max(worst, std::abs(H.energy(s.z) - e0));
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("Jacobian stays symplectic") {
  auto H = harmonic_potential(2);
  auto s = TrajectoryState::initial(std::vector<double>{1.0, -0.5, 0.2, 0.7});
  StepWorkspace ws(2);
  auto spec = IntegratorSpec::make(4, 0.01);
  double prev_defect = 0;
  for (int k = 1; k <= 1000; ++k) {
    composition_step(s, spec, H, ws);
    if (k % 100 == 0) {
      const double dfc = symplectic_defect(s);
      CHECK(dfc < 1e-8);
      CHECK(dfc <= std::max(prev_defect * 2.0, 1e-13));
      prev_defect = std::max(prev_defect, dfc);
    }
  }
  // det W = 1 for the torsional flow too.
  auto T = torsional_potential(1);
  auto r = run({2.5, 0.4}, IntegratorSpec::make(6, 0.05), T, 10.0);
  const double det = r.jacobian[0] * r.jacobian[3] - r.jacobian[1] * r.jacobian[2];
  CHECK(std::abs(det - 1.0) < 1e-10);
}

TEST_CASE("propagation is reversible") {
  auto H = harmonic_potential(1);
  for (int g : {2, 4, 8}) {
    auto fwd = run({1.0, 0.3}, IntegratorSpec::make(g, 0.05), H, 1.0);
    auto back = fwd;
    StepWorkspace ws(1);
    auto spec = IntegratorSpec::make(g, 0.05);
    spec.tau = -0.05;
    for (int k = 0; k < 20; ++k) composition_step(back, spec, H, ws);
    CHECK(std::abs(back.z[0] - 1.0) < 1e-10);
    CHECK(std::abs(back.z[1] - 0.3) < 1e-10);
    CHECK(std::abs(back.action()) < 1e-10);
  }
}

TEST_CASE("step count") {
  CHECK(step_count(20.0, 0.05) == 400);
  CHECK(step_count(0.0, 0.05) == 0);
  CHECK(step_count(1.0, 0.1) == 10);
  CHECK_THROWS_AS(step_count(1.0, 0.3), InvalidArgument);
  CHECK(snapshot_steps(10, 4) == std::vector<std::size_t>{0, 4, 8, 10});
  CHECK(snapshot_steps(8, 4) == std::vector<std::size_t>{0, 4, 8});
  CHECK(snapshot_steps(0, 1) == std::vector<std::size_t>{0});
}

TEST_CASE("propagating a plan") {
  auto dec = decompose_gaussian_initial(PhasePoint({1.0}, {0.0}), 0.1);
  auto plan = sample_qmc(dec, 200);
  auto H = harmonic_potential(1);
  auto spec = IntegratorSpec::make(4, 0.05);

  SUBCASE("t_final = 0 reproduces the plan") {
    PropagationOptions opt;
    opt.t_final = 0.0;
    opt.keep_jacobians = true;
    auto snaps = propagate_plan(plan, spec, H, opt);
    REQUIRE(snaps.size() == 1);
    const auto& e = snaps[0];
    CHECK(e.t == 0.0);
    CHECK(e.centers == plan.coords);
    CHECK(e.r0 == plan.r0_values);
    for (std::size_t i = 0; i < e.rows(); ++i) {
      CHECK(e.action[i] == 0.0);
      CHECK(e.prefactor[i] == Complex(1.0, 0.0));
      CHECK(e.jacobians[4 * i] == 1.0);
      CHECK(e.jacobians[4 * i + 1] == 0.0);
    }
  }

  SUBCASE("snapshots follow the stride and match the closed form") {
    PropagationOptions opt;
    opt.t_final = 1.0;
    opt.snapshot_stride = 8;
    auto snaps = propagate_plan(plan, spec, H, opt);
    REQUIRE(snaps.size() == 4);
    CHECK(snaps[1].t == doctest::Approx(0.4));
    CHECK(snaps[3].t == doctest::Approx(1.0));
    const auto& e = snaps.back();
    for (std::size_t i = 0; i < e.rows(); i += 17) {
      const auto z = plan.row(i);
      const auto ex = harmonic_exact(z[0], z[1], 1.0);
      CHECK(std::abs(e.center(i)[0] - ex.q) < 1e-6);
      CHECK(std::abs(e.action[i] - ex.S) < 1e-6);
      CHECK(std::abs(e.prefactor[i] - std::polar(1.0, -0.5)) < 1e-6);
    }
  }

  SUBCASE("results do not depend on the worker count") {
    PropagationOptions a, b;
    a.t_final = b.t_final = 1.0;
    a.workers = 1;
    b.workers = 7;
    auto ea = propagate_plan(plan, spec, torsional_potential(1), a);
    auto eb = propagate_plan(plan, spec, torsional_potential(1), b);
    REQUIRE(ea.size() == eb.size());
    CHECK(ea.back().centers == eb.back().centers);
    CHECK(ea.back().action == eb.back().action);
    CHECK(ea.back().prefactor == eb.back().prefactor);
  }
}

TEST_CASE("escaping trajectories") {
  // A node far out on the quartic Henon-Heiles wall overflows within a few steps.
  auto dec = decompose_gaussian_initial(PhasePoint({0.0, 0.0}, {0.0, 0.0}), 0.01);
  auto plan = sample_qmc(dec, 8);
  plan.coords[5 * 4] = 1e80;
  auto H = henon_heiles_potential(2, 1.0);
  auto spec = IntegratorSpec::make(2, 0.1);
  PropagationOptions opt;
  opt.t_final = 1.0;
  opt.workers = 3;
  try {
    propagate_plan(plan, spec, H, opt);
    FAIL("expected a trajectory error");
  } catch (const TrajectoryError& e) {
    CHECK(e.index() == 5);
  }
  opt.escape = EscapePolicy::DropAndRenormalise;
  auto snaps = propagate_plan(plan, spec, H, opt);
  const auto& last = snaps.back();
  CHECK(last.valid[5] == 0);
  CHECK(last.valid_records() == 7);
  for (std::size_t i = 0; i < 8; ++i)
    if (i != 5) CHECK(last.valid[i] == 1);
}

TEST_CASE("ensemble binary round trip") {
  auto dec = decompose_gaussian_initial(PhasePoint({1.0, 0.5}, {0.0, 0.2}), 0.1);
  auto plan = sample_pairs(dec, 16, Sampler::MonteCarlo, 3);
  PropagationOptions opt;
  opt.t_final = 0.5;
  opt.snapshot_stride = 5;
  auto snaps = propagate_plan(plan, IntegratorSpec::make(4, 0.05), torsional_potential(2), opt);
  const auto path = (std::filesystem::temp_directory_path() / "hk_test_ensemble.hkens").string();
  {
    EnsembleWriter w(path, snaps.front());
    for (const auto& e : snaps) w.write(e);
    CHECK(w.snapshots_written() == snaps.size());
  }
  auto back = read_ensembles(path);
  REQUIRE(back.size() == snaps.size());
  for (std::size_t k = 0; k < snaps.size(); ++k) {
    CHECK(back[k].t == snaps[k].t);
    CHECK(back[k].mode == SampleMode::Expectation);
    CHECK(back[k].centers == snaps[k].centers);
    CHECK(back[k].action == snaps[k].action);
    CHECK(back[k].prefactor == snaps[k].prefactor);
    CHECK(back[k].theta == snaps[k].theta);
    CHECK(back[k].r0 == snaps[k].r0);
  }
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_ensembles(path), IoError);
}
