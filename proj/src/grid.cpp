#include "hk/grid.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>

#include "hk/error.hpp"

namespace hk {

GridSpec GridSpec::uniform(int d, double lo, double hi, std::size_t n, bool periodic) {
  GridSpec g;
  g.d = d;
  g.lower.assign(static_cast<std::size_t>(d), lo);
  g.upper.assign(static_cast<std::size_t>(d), hi);
  g.n = n;
  g.periodic.assign(static_cast<std::size_t>(d), periodic ? 1 : 0);
  g.validate();
  return g;
}

void GridSpec::validate() const {
  const auto dims = static_cast<std::size_t>(d);
  if (d < 1) throw InvalidArgument("grid dimension must be >= 1");
  if (lower.size() != dims || upper.size() != dims || periodic.size() != dims) {
    throw InvalidArgument("grid bounds must have one entry per axis");
  }
  if (n < 2) throw InvalidArgument("grid needs at least 2 points per axis");
  for (std::size_t k = 0; k < dims; ++k) {
    if (!(upper[k] > lower[k])) throw InvalidArgument("grid upper bound must exceed lower bound");
  }
}

double GridSpec::cell_volume() const {
  double v = 1.0;
  for (int k = 0; k < d; ++k) v *= spacing(k);
  return v;
}

std::size_t GridSpec::size() const {
  std::size_t s = 1;
  for (int k = 0; k < d; ++k) s *= n;
  return s;
}

WaveField WaveField::zeros(const GridSpec& grid, Representation rep, double eps, double t) {
  grid.validate();
  return {grid, std::vector<Complex>(grid.size()), rep, eps, t};
}

double l2_norm(const WaveField& f) {
  double s = 0.0;
  for (const auto& v : f.values) s += std::norm(v);
  return std::sqrt(s * f.grid.cell_volume());
}

double l2_error(const WaveField& f, const WaveField& g) {
  if (!(f.grid == g.grid)) throw GridMismatch("wave fields live on different grids");
  if (f.representation != g.representation) throw GridMismatch("wave fields use different representations");
  double s = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i) s += std::norm(f.values[i] - g.values[i]);
  return std::sqrt(s * f.grid.cell_volume());
}

GridSpec dual_grid(const GridSpec& g, double epsilon) {
  g.validate();
  GridSpec out = g;
  const double half = static_cast<double>(g.n / 2);
  for (int k = 0; k < g.d; ++k) {
    const double length = g.upper[k] - g.lower[k];
    const double dxi = 2.0 * std::numbers::pi * epsilon / length;
    out.lower[k] = -half * dxi;
    out.upper[k] = out.lower[k] + static_cast<double>(g.n) * dxi;
  }
  return out;
}

namespace {

constexpr char kMagic[8] = {'H', 'K', 'W', 'A', 'V', 'E', 'F', 'D'};

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) throw IoError("truncated wave-field file");
  return v;
}

}  // namespace

void write_wavefield(const std::string& path, const WaveField& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, kWaveFieldFormatVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(f.grid.d));
  put<std::uint64_t>(out, f.grid.n);
  for (int k = 0; k < f.grid.d; ++k) {
    put(out, f.grid.lower[k]);
    put(out, f.grid.upper[k]);
    put<std::uint8_t>(out, f.grid.periodic[k]);
  }
  put(out, f.epsilon);
  put(out, f.time);
  put<std::uint32_t>(out, f.representation == Representation::Momentum ? 1u : 0u);
  for (const auto& v : f.values) {
    put(out, v.real());
    put(out, v.imag());
  }
  if (!out) throw IoError("write to " + path + " failed");
}

WaveField read_wavefield(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  char magic[8];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0) {
    throw IoError(path + " is not a wave-field dump");
  }
  if (get<std::uint32_t>(in) != kWaveFieldFormatVersion) throw IoError("unsupported wave-field version");
  WaveField f;
  f.grid.d = static_cast<int>(get<std::uint32_t>(in));
  f.grid.n = get<std::uint64_t>(in);
  for (int k = 0; k < f.grid.d; ++k) {
    f.grid.lower.push_back(get<double>(in));
    f.grid.upper.push_back(get<double>(in));
    f.grid.periodic.push_back(get<std::uint8_t>(in));
  }
  f.grid.validate();
  f.epsilon = get<double>(in);
  f.time = get<double>(in);
  f.representation = get<std::uint32_t>(in) == 1 ? Representation::Momentum : Representation::Position;
  f.values.resize(f.grid.size());
  for (auto& v : f.values) {
    const double re = get<double>(in);
    v = Complex(re, get<double>(in));
  }
  return f;
}

void write_wavefield_slice_csv(std::ostream& os, const WaveField& f) {
  const std::size_t n = f.grid.n;
  std::size_t stride = 1;
  std::size_t offset = 0;
  for (int k = f.grid.d - 1; k >= 1; --k) {
    offset += (n / 2) * stride;
    stride *= n;
  }
  os << (f.representation == Representation::Position ? "x" : "xi") << ",re,im,abs\n";
  os << std::setprecision(12);
  for (std::size_t j = 0; j < n; ++j) {
    const Complex v = f.values[j * stride + offset];
    os << f.grid.coordinate(0, j) << ',' << v.real() << ',' << v.imag() << ',' << std::abs(v) << '\n';
  }
}

}  // namespace hk
