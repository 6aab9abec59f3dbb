#pragma once

#include <span>
#include <vector>

#include "hk/ensemble.hpp"
#include "hk/grid.hpp"

namespace hk {

struct SynthesisOptions {
  /// Skip grid points farther than cutoff_sigmas * sqrt(eps) from a packet centre (per axis).
  bool cutoff = false;
  double cutoff_sigmas = 12.0;
  unsigned workers = 0;
};

/// Running sum of weighted coherent states on a fixed grid.
///
/// The grid is split into tiles of axis-0 rows; each tile adds records in
/// the order they were supplied, so the result does not depend on the
/// worker count. Nested prefixes of one ensemble can be measured by adding
/// record ranges and calling result() in between.
class GaussianAccumulator {
 public:
  GaussianAccumulator(GridSpec grid, double epsilon, Representation rep = Representation::Position,
                      SynthesisOptions options = {});

  /// Adds sum_k coeffs[k] g_{centers[k]} where centres are rows of 2d doubles
  /// in the accumulator's representation (no further transformation).
  void add_packets(std::span<const double> centers, std::span<const Complex> coeffs);
  /// Adds records [begin, end) of a wave-function ensemble; invalid rows are skipped.
  /// In momentum representation every packet is replaced by its Fourier image.
  void add(const HKEnsemble& e, std::size_t begin, std::size_t end);
  void add(const HKEnsemble& e) { add(e, 0, e.rows()); }

  /// Number of records accumulated by add().
  std::size_t count() const { return count_; }
  /// Accumulated sum divided by count().
  WaveField result(double t) const;
  const std::vector<Complex>& sum() const { return sum_; }

 private:
  GridSpec grid_;
  double epsilon_;
  Representation rep_;
  SynthesisOptions options_;
  std::vector<Complex> sum_;
  std::size_t count_ = 0;
};

/// psi_M(t) on a position grid.
WaveField synthesize(const HKEnsemble& e, const GridSpec& grid, const SynthesisOptions& options = {});
/// Eps-scaled Fourier transform of psi_M(t) on a momentum grid.
WaveField synthesize_momentum(const HKEnsemble& e, const GridSpec& grid,
                              const SynthesisOptions& options = {});

/// Exact samples of g^eps_z on the grid axis points x_j, j in [j0, j1), of one axis.
/// Zero beyond `radius` from q when radius > 0.
void axis_factors(double lower, double dx, std::size_t j0, std::size_t j1, double q, double p,
                  double epsilon, double radius, Complex* out);

/// Single coherent state on a grid.
WaveField packet_on_grid(const GaussianPacket& g, const GridSpec& grid,
                         Representation rep = Representation::Position);

}  // namespace hk
