#include "hk/prefactor.hpp"

#include <cmath>
#include <string>

#include "hk/error.hpp"

namespace hk {

PrefactorState PrefactorState::initial(int d) {
  const double det = std::ldexp(1.0, d);
  return {Complex(det, 0.0), 0.0, det};
}

std::vector<Complex> hk_matrix(std::span<const double> jacobian, int d) {
  const auto n = static_cast<std::size_t>(d);
  if (jacobian.size() != 4 * n * n) throw InvalidArgument("Jacobian must be 2d x 2d");
  const std::size_t row = 2 * n;
  std::vector<Complex> z(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double dq_x = jacobian[i * row + j];
      const double dp_x = jacobian[i * row + n + j];
      const double dq_xi = jacobian[(n + i) * row + j];
      const double dp_xi = jacobian[(n + i) * row + n + j];
      z[i * n + j] = Complex(dq_x + dp_xi, dq_xi - dp_x);
    }
  }
  return z;
}

Complex determinant_in_place(std::span<Complex> a, int n) {
  Complex det(1.0, 0.0);
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    double best = std::abs(a[col * n + col]);
    for (int r = col + 1; r < n; ++r) {
      const double v = std::abs(a[r * n + col]);
      if (v > best) {
        best = v;
        pivot = r;
      }
    }
    if (best == 0.0) return Complex(0.0, 0.0);
    if (pivot != col) {
      for (int j = 0; j < n; ++j) std::swap(a[col * n + j], a[pivot * n + j]);
      det = -det;
    }
    const Complex diag = a[col * n + col];
    det *= diag;
    for (int r = col + 1; r < n; ++r) {
      const Complex factor = a[r * n + col] / diag;
      for (int j = col + 1; j < n; ++j) a[r * n + j] -= factor * a[col * n + j];
    }
  }
  return det;
}

PrefactorState update_theta(const PrefactorState& prev, Complex det_new) {
  const double magnitude = std::abs(det_new);
  if (!std::isfinite(magnitude)) throw CausticError("det Z_t is not finite");
  if (magnitude == 0.0) {
    throw CausticError("det Z_t vanished; time step too large or degenerate trajectory");
  }
  // arg(det_new / det_prev) lies in (-pi, pi] and is the wrapped increment.
  const double delta = std::arg(det_new * std::conj(prev.det_value));
  if (std::abs(delta) > kMaxThetaStep) {
    throw StepTooLargeError("arg det Z_t changed by " + std::to_string(delta) +
                            " in one step; continuity cannot be certified");
  }
  return {det_new, prev.theta + delta, magnitude};
}

Complex hk_prefactor(const PrefactorState& state, int d) {
  if (!(state.magnitude > 0.0)) throw CausticError("det Z_t vanished");
  const double modulus = std::sqrt(std::ldexp(state.magnitude, -d));
  return std::polar(modulus, 0.5 * state.theta);
}

}  // namespace hk
