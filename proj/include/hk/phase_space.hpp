#pragma once

#include <complex>
#include <span>
#include <vector>

namespace hk {

using Complex = std::complex<double>;

/// A point z = (q, p) of the 2d-dimensional classical phase space.
/// Stored flat as [q_1..q_d, p_1..p_d] so it can be handed to the
/// span-based kernels without copying.
class PhasePoint {
 public:
  PhasePoint() = default;
  PhasePoint(std::span<const double> q, std::span<const double> p);
  PhasePoint(std::initializer_list<double> q, std::initializer_list<double> p);

  static PhasePoint from_flat(std::span<const double> z);
  static PhasePoint origin(int d);

  int dim() const { return static_cast<int>(z_.size() / 2); }
  std::span<const double> q() const { return {z_.data(), z_.size() / 2}; }
  std::span<const double> p() const { return {z_.data() + z_.size() / 2, z_.size() / 2}; }
  std::span<double> q() { return {z_.data(), z_.size() / 2}; }
  std::span<double> p() { return {z_.data() + z_.size() / 2, z_.size() / 2}; }
  std::span<const double> flat() const { return z_; }

  friend bool operator==(const PhasePoint&, const PhasePoint&) = default;

 private:
  std::vector<double> z_;
};

/// Frozen-width coherent state g^eps_z.
struct GaussianPacket {
  PhasePoint center;
  double epsilon = 1.0;

  GaussianPacket() = default;
  GaussianPacket(PhasePoint c, double eps);
};

/// (pi eps)^{-d/4} exp(-|x-q|^2/(2 eps) + (i/eps) p.(x-q)) for a flat centre z.
Complex packet_value(std::span<const double> z, double epsilon, std::span<const double> x);

Complex eval_packet(const GaussianPacket& g, std::span<const double> x);

struct FourierImage {
  Complex phase;
  GaussianPacket packet;
};

/// eps-scaled Fourier transform of a packet: F g_(q,p) = e^{-(i/eps) p.q} g_(p,-q).
FourierImage packet_fourier_image(const GaussianPacket& g);

}  // namespace hk
