#include "hk/synthesis.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hk/error.hpp"
#include "hk/parallel.hpp"

namespace hk {

namespace {

constexpr std::size_t kTileRows = 64;
constexpr std::size_t kChunk = 256;
constexpr std::size_t kBlock = 32;

using CMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;
using CRowMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace

void axis_factors(double lower, double dx, std::size_t j0, std::size_t j1, double q, double p,
                  double epsilon, double radius, Complex* out) {
  const double norm = std::pow(std::numbers::pi * epsilon, -0.25);
  const double rho = std::exp(-dx * dx / epsilon);
  const Complex step_phase = std::polar(1.0, p * dx / epsilon);
  for (std::size_t b0 = j0; b0 < j1; b0 += kBlock) {
    const std::size_t b1 = std::min(b0 + kBlock, j1);
    // Anchor at the block point nearest q and recur outward, so every ratio has modulus <= 1.
    const double jq = std::round((q - lower) / dx);
    const std::size_t jc = static_cast<std::size_t>(
        std::clamp(jq, static_cast<double>(b0), static_cast<double>(b1 - 1)));
    const double uc = lower + static_cast<double>(jc) * dx - q;
    const double expo = -uc * uc / (2.0 * epsilon);
    if (expo < -745.0) {
      std::fill(out + (b0 - j0), out + (b1 - j0), Complex(0.0));
      continue;
    }
    const Complex fc = norm * std::exp(expo) * std::polar(1.0, p * uc / epsilon);
    out[jc - j0] = fc;
    Complex f = fc;
    Complex r = std::exp(-(2.0 * uc * dx + dx * dx) / (2.0 * epsilon)) * step_phase;
    for (std::size_t j = jc + 1; j < b1; ++j) {
      f *= r;
      r *= rho;
      out[j - j0] = f;
    }
    f = fc;
    r = std::exp((2.0 * uc * dx - dx * dx) / (2.0 * epsilon)) * std::conj(step_phase);
    for (std::size_t j = jc; j-- > b0;) {
      f *= r;
      r *= rho;
      out[j - j0] = f;
    }
    if (radius > 0.0) {
      for (std::size_t j = b0; j < b1; ++j) {
        if (std::abs(lower + static_cast<double>(j) * dx - q) > radius) out[j - j0] = 0.0;
      }
    }
  }
}

GaussianAccumulator::GaussianAccumulator(GridSpec grid, double epsilon, Representation rep,
                                         SynthesisOptions options)
    : grid_(std::move(grid)), epsilon_(epsilon), rep_(rep), options_(options) {
  grid_.validate();
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  sum_.assign(grid_.size(), Complex(0.0));
}

void GaussianAccumulator::add_packets(std::span<const double> centers, std::span<const Complex> coeffs) {
  const int d = grid_.d;
  const auto width = 2 * static_cast<std::size_t>(d);
  const std::size_t records = coeffs.size();
  if (centers.size() != records * width) throw InvalidArgument("centre rows do not match the grid dimension");
  if (records == 0) return;

  const std::size_t n = grid_.n;
  std::size_t rest = 1;
  for (int k = 1; k < d; ++k) rest *= n;
  const double radius = options_.cutoff ? options_.cutoff_sigmas * std::sqrt(epsilon_) : 0.0;
  const std::size_t tiles = (n + kTileRows - 1) / kTileRows;

  parallel_for(tiles, resolve_workers(options_.workers), [&](std::size_t tile) {
    const std::size_t r0 = tile * kTileRows;
    const std::size_t r1 = std::min(n, r0 + kTileRows);
    const std::size_t tile_rows = r1 - r0;
    CMatrix A(tile_rows, kChunk);
    CMatrix B(rest, kChunk);
    std::vector<Complex> axis(n);
    std::vector<Complex> column(rest);
    Eigen::Map<CRowMatrix> psi(sum_.data() + r0 * rest, static_cast<Eigen::Index>(tile_rows),
                               static_cast<Eigen::Index>(rest));

    std::size_t filled = 0;
    auto flush = [&] {
      if (filled == 0) return;
      psi.noalias() += A.leftCols(filled) * B.leftCols(filled).transpose();
      filled = 0;
    };
    for (std::size_t m = 0; m < records; ++m) {
      if (coeffs[m] == Complex(0.0)) continue;
      const double* z = centers.data() + m * width;
      axis_factors(grid_.lower[0], grid_.spacing(0), r0, r1, z[0], z[d], epsilon_, radius,
                   A.col(static_cast<Eigen::Index>(filled)).data());
      if (A.col(static_cast<Eigen::Index>(filled)).isZero(0.0)) continue;

      // Tensor product of the remaining axes, with the coefficient folded in.
      column[0] = coeffs[m];
      std::size_t len = 1;
      bool empty = false;
      for (int k = 1; k < d && !empty; ++k) {
        axis_factors(grid_.lower[k], grid_.spacing(k), 0, n, z[k], z[d + k], epsilon_, radius, axis.data());
        empty = std::all_of(axis.begin(), axis.end(), [](Complex c) { return c == Complex(0.0); });
        for (std::size_t i = len; i-- > 0;) {
          const Complex c = column[i];
          for (std::size_t j = 0; j < n; ++j) column[i * n + j] = c * axis[j];
        }
        len *= n;
      }
      if (empty) continue;
      std::copy(column.begin(), column.end(), B.col(static_cast<Eigen::Index>(filled)).data());
      if (++filled == kChunk) flush();
    }
    flush();
  });
}

void GaussianAccumulator::add(const HKEnsemble& e, std::size_t begin, std::size_t end) {
  if (e.mode != SampleMode::Wavefunction) throw InvalidArgument("synthesis needs a wave-function ensemble");
  if (e.d != grid_.d) throw InvalidArgument("grid dimension does not match the ensemble");
  if (e.epsilon != epsilon_) throw InvalidArgument("ensemble epsilon does not match the accumulator");
  end = std::min(end, e.rows());
  if (begin >= end) return;
  const int d = e.d;
  const auto width = 2 * static_cast<std::size_t>(d);
  std::vector<double> centers;
  std::vector<Complex> coeffs;
  centers.reserve((end - begin) * width);
  coeffs.reserve(end - begin);
  for (std::size_t i = begin; i < end; ++i) {
    if (!e.valid[i]) continue;
    ++count_;
    auto z = e.center(i);
    Complex c = e.weight(i);
    if (rep_ == Representation::Momentum) {
      double pq = 0.0;
      for (int k = 0; k < d; ++k) pq += z[k] * z[d + k];
      c *= std::polar(1.0, -pq / epsilon_);
      for (int k = 0; k < d; ++k) centers.push_back(z[d + k]);
      for (int k = 0; k < d; ++k) centers.push_back(-z[k]);
    } else {
      centers.insert(centers.end(), z.begin(), z.end());
    }
    coeffs.push_back(c);
  }
  add_packets(centers, coeffs);
}

WaveField GaussianAccumulator::result(double t) const {
  WaveField f{grid_, sum_, rep_, epsilon_, t};
  if (count_ == 0) throw InvalidArgument("no records accumulated");
  const double inv = 1.0 / static_cast<double>(count_);
  for (auto& v : f.values) v *= inv;
  return f;
}

WaveField synthesize(const HKEnsemble& e, const GridSpec& grid, const SynthesisOptions& options) {
  GaussianAccumulator acc(grid, e.epsilon, Representation::Position, options);
  acc.add(e);
  return acc.result(e.t);
}

WaveField synthesize_momentum(const HKEnsemble& e, const GridSpec& grid, const SynthesisOptions& options) {
  GaussianAccumulator acc(grid, e.epsilon, Representation::Momentum, options);
  acc.add(e);
  return acc.result(e.t);
}

WaveField packet_on_grid(const GaussianPacket& g, const GridSpec& grid, Representation rep) {
  if (g.center.dim() != grid.d) throw InvalidArgument("grid dimension does not match the packet");
  GaussianAccumulator acc(grid, g.epsilon, rep, {.cutoff = false, .cutoff_sigmas = 12.0, .workers = 1});
  const Complex one(1.0);
  acc.add_packets(g.center.flat(), std::span<const Complex>(&one, 1));
  WaveField f{grid, acc.sum(), rep, g.epsilon, 0.0};
  return f;
}

}  // namespace hk
