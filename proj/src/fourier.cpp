#include "hk/fourier.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

#include "hk/error.hpp"

namespace hk {

namespace {
// FFTW's planner is not thread-safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct FftPlan::Impl {
  int d;
  std::size_t n;
  std::size_t total;
  fftw_complex* buffer = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;

  Impl(int dims, std::size_t points) : d(dims), n(points), total(1) {
    std::vector<int> shape(static_cast<std::size_t>(d), static_cast<int>(n));
    for (int k = 0; k < d; ++k) total *= n;
    std::lock_guard lock(planner_mutex());
    buffer = fftw_alloc_complex(total);
    fwd = fftw_plan_dft(d, shape.data(), buffer, buffer, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd = fftw_plan_dft(d, shape.data(), buffer, buffer, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~Impl() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
    fftw_free(buffer);
  }

  void run(fftw_plan plan, std::vector<Complex>& data) {
    if (data.size() != total) throw InvalidArgument("FFT input has wrong size");
    auto* raw = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plan, raw, raw);
  }
};

FftPlan::FftPlan(int d, std::size_t n) : impl_(std::make_unique<Impl>(d, n)) {}
FftPlan::~FftPlan() = default;
FftPlan::FftPlan(FftPlan&&) noexcept = default;
FftPlan& FftPlan::operator=(FftPlan&&) noexcept = default;

void FftPlan::forward(std::vector<Complex>& data) { impl_->run(impl_->fwd, data); }
void FftPlan::backward(std::vector<Complex>& data) { impl_->run(impl_->bwd, data); }

WaveField to_momentum(const WaveField& position) {
  if (position.representation != Representation::Position) {
    throw InvalidArgument("to_momentum expects a position-space field");
  }
  const auto& g = position.grid;
  const double eps = position.epsilon;
  WaveField out = position;
  out.representation = Representation::Momentum;
  out.grid = dual_grid(g, eps);

  FftPlan plan(g.d, g.n);
  std::vector<Complex> data = position.values;
  plan.forward(data);

  // F psi(xi_k) = (2 pi eps)^{-d/2} dx^d e^{-i a.xi_k/eps} DFT(psi)_k, with the
  // DFT bins reordered so the output grid runs from -n/2 to n/2 - 1.
  const std::size_t n = g.n;
  const double scale = std::pow(2.0 * std::numbers::pi * eps, -0.5 * g.d) * g.cell_volume();
  std::vector<std::size_t> idx(static_cast<std::size_t>(g.d));
  for (std::size_t flat = 0; flat < out.values.size(); ++flat) {
    std::size_t rem = flat;
    double phase = 0.0;
    std::size_t src = 0;
    for (int k = g.d - 1; k >= 0; --k) {
      idx[k] = rem % n;
      rem /= n;
    }
    for (int k = 0; k < g.d; ++k) {
      const long freq = static_cast<long>(idx[k]) - static_cast<long>(n / 2);
      const std::size_t bin = freq < 0 ? static_cast<std::size_t>(freq + static_cast<long>(n))
                                       : static_cast<std::size_t>(freq);
      src = src * n + bin;
      phase -= g.lower[k] * out.grid.coordinate(k, idx[k]) / eps;
    }
    out.values[flat] = scale * std::polar(1.0, phase) * data[src];
  }
  return out;
}

}  // namespace hk
