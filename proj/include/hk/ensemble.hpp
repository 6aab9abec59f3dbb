#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hk/phase_space.hpp"
#include "hk/sampling.hpp"

namespace hk {

/// Per-trajectory data at a common time t, enough to evaluate psi_M(t) or A_M(t).
///
/// Rows follow the sample plan order. In expectation mode rows 2m and 2m+1
/// are the (w_m, z_m) components of pair m.
struct HKEnsemble {
  double t = 0.0;
  double epsilon = 1.0;
  int d = 1;
  SampleMode mode = SampleMode::Wavefunction;
  std::vector<double> centers;     ///< propagated centres Phi^t(z), rows of 2d
  std::vector<Complex> r0;         ///< initial weights r0(z)
  std::vector<double> action;      ///< S = S_T + S_V
  std::vector<Complex> prefactor;  ///< u(t, z)
  std::vector<double> theta;       ///< continuous argument of det Z_t
  std::vector<std::uint8_t> valid;  ///< 0 for trajectories dropped after escaping
  std::vector<double> jacobians;   ///< optional, rows of (2d)^2

  std::size_t rows() const { return action.size(); }
  /// Number of quadrature records M (pairs in expectation mode).
  std::size_t size() const { return mode == SampleMode::Expectation ? rows() / 2 : rows(); }
  std::span<const double> center(std::size_t i) const {
    const auto w = 2 * static_cast<std::size_t>(d);
    return {centers.data() + i * w, w};
  }
  /// r0 u e^{iS/eps} for row i.
  Complex weight(std::size_t i) const;
  /// Records still contributing (pairs count as one; a pair is valid if both rows are).
  std::size_t valid_records() const;
  bool record_valid(std::size_t m) const;

  void reserve(std::size_t rows);
  void push_back(std::span<const double> z, Complex r0_value, double s, Complex u, double th);
};

/// Concatenates ensembles at the same time (same d, eps, mode).
HKEnsemble concatenate(std::span<const HKEnsemble> parts);

}  // namespace hk
