#include "hk/ensemble_io.hpp"

#include <cmath>
#include <cstring>

#include "hk/error.hpp"

namespace hk {

namespace {

constexpr char kMagic[8] = {'H', 'K', 'E', 'N', 'S', 'E', 'M', 'B'};
constexpr char kSnapMagic[4] = {'S', 'N', 'A', 'P'};

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) throw IoError("truncated ensemble file");
  return v;
}

}  // namespace

EnsembleWriter::EnsembleWriter(const std::string& path, const HKEnsemble& first)
    : out_(path, std::ios::binary), d_(first.d), rows_(first.rows()) {
  if (!out_) throw IoError("cannot open " + path + " for writing");
  out_.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(out_, kEnsembleFormatVersion);
  put<std::uint32_t>(out_, static_cast<std::uint32_t>(d_));
  put<std::uint64_t>(out_, rows_);
  put<double>(out_, first.epsilon);
  put<std::uint32_t>(out_, first.mode == SampleMode::Expectation ? 1u : 0u);
  for (const auto& r : first.r0) {
    put(out_, r.real());
    put(out_, r.imag());
  }
}

void EnsembleWriter::write(const HKEnsemble& e) {
  if (e.d != d_ || e.rows() != rows_) throw InvalidArgument("ensemble shape changed between snapshots");
  out_.write(kSnapMagic, sizeof kSnapMagic);
  put(out_, e.t);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (double v : e.center(i)) put(out_, v);
    put(out_, e.action[i]);
    put(out_, e.prefactor[i].real());
    put(out_, e.prefactor[i].imag());
    put(out_, e.theta[i]);
  }
  if (!out_) throw IoError("write to ensemble stream failed");
  ++snapshots_;
}

std::vector<HKEnsemble> read_ensembles(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  char magic[8];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0) {
    throw IoError(path + " is not an ensemble stream");
  }
  if (get<std::uint32_t>(in) != kEnsembleFormatVersion) throw IoError("unsupported ensemble version");
  HKEnsemble proto;
  proto.d = static_cast<int>(get<std::uint32_t>(in));
  const auto rows = get<std::uint64_t>(in);
  proto.epsilon = get<double>(in);
  proto.mode = get<std::uint32_t>(in) == 1 ? SampleMode::Expectation : SampleMode::Wavefunction;
  proto.r0.resize(rows);
  for (auto& r : proto.r0) {
    const double re = get<double>(in);
    r = Complex(re, get<double>(in));
  }
  std::vector<HKEnsemble> out;
  const std::size_t width = 2 * static_cast<std::size_t>(proto.d);
  while (in.peek() != std::char_traits<char>::eof()) {
    char snap[4];
    if (!in.read(snap, sizeof snap) || std::memcmp(snap, kSnapMagic, sizeof snap) != 0) {
      throw IoError("corrupt snapshot marker in " + path);
    }
    HKEnsemble e = proto;
    e.t = get<double>(in);
    e.centers.resize(rows * width);
    e.action.resize(rows);
    e.prefactor.resize(rows);
    e.theta.resize(rows);
    e.valid.assign(rows, 1);
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < width; ++j) e.centers[i * width + j] = get<double>(in);
      e.action[i] = get<double>(in);
      const double re = get<double>(in);
      e.prefactor[i] = Complex(re, get<double>(in));
      e.theta[i] = get<double>(in);
      if (!std::isfinite(e.action[i])) e.valid[i] = 0;
    }
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace hk
