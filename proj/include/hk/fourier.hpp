#pragma once

#include <memory>

#include "hk/grid.hpp"

namespace hk {

/// In-place multidimensional FFT on n^d complex values (FFTW backend).
class FftPlan {
 public:
  FftPlan(int d, std::size_t n);
  ~FftPlan();
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;
  FftPlan(FftPlan&&) noexcept;
  FftPlan& operator=(FftPlan&&) noexcept;

  /// Unnormalised forward transform, sum_j a_j e^{-2 pi i jk/n}.
  void forward(std::vector<Complex>& data);
  /// Unnormalised backward transform, sum_k a_k e^{+2 pi i jk/n}.
  void backward(std::vector<Complex>& data);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Signed wave-number index of DFT bin j: j for j < n/2, j - n otherwise.
inline long signed_frequency(std::size_t j, std::size_t n) {
  return j < n / 2 ? static_cast<long>(j) : static_cast<long>(j) - static_cast<long>(n);
}

/// Discrete eps-scaled Fourier transform of a position field onto dual_grid().
WaveField to_momentum(const WaveField& position);

}  // namespace hk
