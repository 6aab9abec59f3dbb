#include "hk/integrator.hpp"

#include <cmath>
#include <string>

#include "hk/error.hpp"

namespace hk {

namespace {

// Symmetric tables, listed from the first stage to the middle one.
// Order 6, 7 stages: Yoshida (1990) solution A, also tabulated by Kahan & Li (1997).
constexpr double kOrder6Half[] = {0.78451361047755726381949763, 0.23557321335935813368479318,
                                  -1.17767998417887100694641568, 1.31518632068391121888424973};
// Order 8, 15 stages: McLachlan (1995) / Kahan & Li (1997), as listed in
// Hairer, Lubich & Wanner, Geometric Numerical Integration, sec. V.3.2.
constexpr double kOrder8Half[] = {0.74167036435061295344822780, -0.40910082580003159399730010,
                                  0.19075471029623837995387626, -0.57386247111608226665638773,
                                  0.29906418130365592384446354, 0.33462491824529818378495798,
                                  0.31529309239676659663205666, -0.79688793935291635401978884};

template <std::size_t N>
std::vector<double> mirror(const double (&half)[N]) {
  std::vector<double> c(half, half + N);
  for (std::size_t k = N - 1; k-- > 0;) c.push_back(half[k]);
  return c;
}

}  // namespace

std::vector<double> composition_coefficients(int order) {
  switch (order) {
    case 2:
      return {1.0};
    case 4: {
      const double c1 = 1.0 / (2.0 - std::cbrt(2.0));
      return {c1, 1.0 - 2.0 * c1, c1};
    }
    case 6:
      return mirror(kOrder6Half);
    case 8:
      return mirror(kOrder8Half);
    default:
      throw InvalidArgument("integrator order must be 2, 4, 6 or 8 (got " + std::to_string(order) + ")");
  }
}

IntegratorSpec IntegratorSpec::make(int order, double tau) {
  IntegratorSpec spec{order, tau, composition_coefficients(order)};
  spec.validate();
  return spec;
}

void IntegratorSpec::validate() const {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw InvalidArgument("time step tau must be positive");
  if (coefficients.empty()) throw InvalidArgument("composition needs at least one stage");
  double sum = 0.0;
  const std::size_t s = coefficients.size();
  for (std::size_t k = 0; k < s; ++k) {
    sum += coefficients[k];
    if (std::abs(coefficients[k] - coefficients[s - 1 - k]) > 1e-15) {
      throw InvalidArgument("composition coefficients must be symmetric");
    }
  }
  if (std::abs(sum - 1.0) > 1e-14) throw InvalidArgument("composition coefficients must sum to 1");
}

TrajectoryState TrajectoryState::initial(std::span<const double> z0) {
  if (z0.size() % 2 != 0 || z0.empty()) throw InvalidArgument("initial point must have length 2d");
  TrajectoryState s;
  s.d = static_cast<int>(z0.size() / 2);
  s.z.assign(z0.begin(), z0.end());
  const std::size_t n = z0.size();
  s.jacobian.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) s.jacobian[i * n + i] = 1.0;
  s.prefactor = PrefactorState::initial(s.d);
  return s;
}

bool TrajectoryState::finite() const {
  for (double v : z) {
    if (!std::isfinite(v)) return false;
  }
  for (double v : jacobian) {
    if (!std::isfinite(v)) return false;
  }
  return std::isfinite(action_kinetic) && std::isfinite(action_potential);
}

StepWorkspace::StepWorkspace(int d)
    : grad(static_cast<std::size_t>(d)),
      hess(static_cast<std::size_t>(d) * d),
      zmat(static_cast<std::size_t>(d) * d) {}

void kick(TrajectoryState& s, double h, const SeparableHamiltonian& H, StepWorkspace& ws) {
  const int d = s.d;
  const int n = 2 * d;
  const auto q = s.q();
  H.gradient(q, ws.grad);
  H.hessian(q, ws.hess);
  s.action_potential -= h * H.potential(q);
  for (int k = 0; k < d; ++k) s.z[d + k] -= h * ws.grad[k];

  double* W = s.jacobian.data();
  if (H.diagonal_hessian()) {
    for (int i = 0; i < d; ++i) {
      const double c = h * ws.hess[i * d + i];
      if (c == 0.0) continue;
      double* xi_row = W + (d + i) * n;
      const double* x_row = W + i * n;
      for (int j = 0; j < n; ++j) xi_row[j] -= c * x_row[j];
    }
    return;
  }
  for (int i = 0; i < d; ++i) {
    double* xi_row = W + (d + i) * n;
    for (int k = 0; k < d; ++k) {
      const double c = h * ws.hess[i * d + k];
      if (c == 0.0) continue;
      const double* x_row = W + k * n;
      for (int j = 0; j < n; ++j) xi_row[j] -= c * x_row[j];
    }
  }
}

void drift(TrajectoryState& s, double h) {
  const int d = s.d;
  const int n = 2 * d;
  double p2 = 0.0;
  for (int k = 0; k < d; ++k) {
    const double p = s.z[d + k];
    p2 += p * p;
    s.z[k] += h * p;
  }
  s.action_kinetic += 0.5 * h * p2;
  double* W = s.jacobian.data();
  for (int i = 0; i < d; ++i) {
    double* x_row = W + i * n;
    const double* xi_row = W + (d + i) * n;
    for (int j = 0; j < n; ++j) x_row[j] += h * xi_row[j];
  }
}

void verlet_step(TrajectoryState& s, double h, const SeparableHamiltonian& H, StepWorkspace& ws) {
  kick(s, 0.5 * h, H, ws);
  drift(s, h);
  kick(s, 0.5 * h, H, ws);
  s.t += h;
}

TrajectoryState verlet_step(TrajectoryState s, double h, const SeparableHamiltonian& H) {
  StepWorkspace ws(s.d);
  verlet_step(s, h, H, ws);
  return s;
}

void refresh_prefactor(TrajectoryState& s, StepWorkspace& ws) {
  const int d = s.d;
  const int n = 2 * d;
  const double* W = s.jacobian.data();
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      ws.zmat[i * d + j] = Complex(W[i * n + j] + W[(d + i) * n + d + j],
                                   W[(d + i) * n + j] - W[i * n + d + j]);
    }
  }
  s.prefactor = update_theta(s.prefactor, determinant_in_place(ws.zmat, d));
}

// Adjacent half-kicks of consecutive Verlet stages act at the same q and are
// merged; the resulting map equals the plain sequence of verlet_step calls.
void composition_step(TrajectoryState& s, const IntegratorSpec& spec, const SeparableHamiltonian& H,
                      StepWorkspace& ws) {
  const auto& c = spec.coefficients;
  const double tau = spec.tau;
  kick(s, 0.5 * c.front() * tau, H, ws);
  for (std::size_t k = 0; k < c.size(); ++k) {
    drift(s, c[k] * tau);
    const double next = k + 1 < c.size() ? c[k + 1] : 0.0;
    kick(s, 0.5 * (c[k] + next) * tau, H, ws);
  }
  s.t += tau;
  refresh_prefactor(s, ws);
}

TrajectoryState composition_step(TrajectoryState s, const IntegratorSpec& spec,
                                 const SeparableHamiltonian& H) {
  StepWorkspace ws(s.d);
  composition_step(s, spec, H, ws);
  return s;
}

void composition_flow_step(std::span<double> z, const IntegratorSpec& spec,
                           const SeparableHamiltonian& H, std::span<double> grad) {
  const std::size_t d = z.size() / 2;
  const auto q = z.first(d);
  const auto p = z.last(d);
  const auto& c = spec.coefficients;
  auto kick_flow = [&](double h) {
    H.gradient(q, grad);
    for (std::size_t k = 0; k < d; ++k) p[k] -= h * grad[k];
  };
  kick_flow(0.5 * c.front() * spec.tau);
  for (std::size_t k = 0; k < c.size(); ++k) {
    const double h = c[k] * spec.tau;
    for (std::size_t j = 0; j < d; ++j) q[j] += h * p[j];
    const double next = k + 1 < c.size() ? c[k + 1] : 0.0;
    kick_flow(0.5 * (c[k] + next) * spec.tau);
  }
}

std::size_t step_count(double t_final, double tau) {
  if (!(t_final >= 0.0)) throw InvalidArgument("final time must be non-negative");
  if (!(tau > 0.0)) throw InvalidArgument("time step must be positive");
  const double steps = std::round(t_final / tau);
  if (std::abs(steps * tau - t_final) > 1e-9 * std::max(1.0, t_final)) {
    throw InvalidArgument("final time " + std::to_string(t_final) +
                          " is not an integer multiple of tau " + std::to_string(tau));
  }
  return static_cast<std::size_t>(steps);
}

}  // namespace hk
