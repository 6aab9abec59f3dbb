#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hk/phase_space.hpp"

namespace hk {

/// Uniform tensor grid with n points per axis, x_j = lower + j * (upper - lower) / n.
/// The upper bound is excluded so the same grid serves periodic solvers.
struct GridSpec {
  int d = 1;
  std::vector<double> lower;
  std::vector<double> upper;
  std::size_t n = 2;
  std::vector<std::uint8_t> periodic;

  static GridSpec uniform(int d, double lo, double hi, std::size_t n, bool periodic = false);
  void validate() const;

  double spacing(int axis) const { return (upper[axis] - lower[axis]) / static_cast<double>(n); }
  double coordinate(int axis, std::size_t j) const { return lower[axis] + static_cast<double>(j) * spacing(axis); }
  double cell_volume() const;
  std::size_t size() const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

enum class Representation { Position, Momentum };

/// Complex amplitudes on a grid, row-major with axis 0 slowest.
struct WaveField {
  GridSpec grid;
  std::vector<Complex> values;
  Representation representation = Representation::Position;
  double epsilon = 1.0;
  double time = 0.0;

  static WaveField zeros(const GridSpec& grid, Representation rep, double eps, double t);
};

/// sqrt(sum |psi|^2 * cell volume).
double l2_norm(const WaveField& f);
/// ||f - g||; throws GridMismatch unless grids and representations agree.
double l2_error(const WaveField& f, const WaveField& g);

/// Momentum grid dual to `g` under the discrete eps-scaled Fourier transform:
/// xi_k = 2 pi eps k / L for k = -n/2 .. n/2 - 1.
GridSpec dual_grid(const GridSpec& g, double epsilon);

inline constexpr std::uint32_t kWaveFieldFormatVersion = 1;

/// Versioned binary dump (see docs/formats.md).
void write_wavefield(const std::string& path, const WaveField& f);
WaveField read_wavefield(const std::string& path);
/// CSV slice through the grid centre along axis 0: x, re, im, abs.
void write_wavefield_slice_csv(std::ostream& os, const WaveField& f);

}  // namespace hk
