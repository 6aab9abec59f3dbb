#pragma once

#include <numbers>
#include <span>
#include <vector>

#include "hk/phase_space.hpp"

namespace hk {

/// det Z_t together with a continuous choice of its argument.
struct PrefactorState {
  Complex det_value{1.0, 0.0};
  double theta = 0.0;
  double magnitude = 1.0;

  /// State at t = 0, where Z_0 = 2 Id_d.
  static PrefactorState initial(int d);
};

/// Largest accepted per-step change of arg det Z_t.
inline constexpr double kMaxThetaStep = std::numbers::pi - 0.1;

/// Z = dqX - i dpX + i dqXi + dpXi from a row-major 2d x 2d Jacobian.
/// Returns the d x d result row-major.
std::vector<Complex> hk_matrix(std::span<const double> jacobian, int d);

/// Determinant by LU with partial pivoting; `a` (n x n row-major) is overwritten.
Complex determinant_in_place(std::span<Complex> a, int n);

/// Advances the continuous argument to det_new using the wrapped principal
/// difference. Throws CausticError for det_new == 0 and StepTooLargeError
/// when the argument jumps by more than kMaxThetaStep.
PrefactorState update_theta(const PrefactorState& prev, Complex det_new);

/// sqrt(2^{-d} |det Z|) e^{i theta / 2}.
Complex hk_prefactor(const PrefactorState& state, int d);

}  // namespace hk
