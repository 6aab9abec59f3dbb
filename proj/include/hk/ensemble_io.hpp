#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "hk/ensemble.hpp"

namespace hk {

/// Streams ensembles to a versioned little-endian binary file.
///
/// Layout (see docs/formats.md):
///   header   "HKENSEMB" | u32 version=1 | u32 d | u64 rows | f64 epsilon | u32 mode
///   r0 table rows x [Re r0, Im r0]
///   snapshot "SNAP" | f64 t | rows x [z (2d), S, Re u, Im u, theta]
/// Dropped trajectories are written as NaN rows.
class EnsembleWriter {
 public:
  EnsembleWriter(const std::string& path, const HKEnsemble& first);
  void write(const HKEnsemble& e);
  std::size_t snapshots_written() const { return snapshots_; }

 private:
  std::ofstream out_;
  int d_;
  std::size_t rows_;
  std::size_t snapshots_ = 0;
};

inline constexpr std::uint32_t kEnsembleFormatVersion = 1;

std::vector<HKEnsemble> read_ensembles(const std::string& path);

}  // namespace hk
