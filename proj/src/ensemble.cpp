#include "hk/ensemble.hpp"

#include <cmath>

#include "hk/error.hpp"

namespace hk {

Complex HKEnsemble::weight(std::size_t i) const {
  return r0[i] * prefactor[i] * std::exp(Complex(0.0, action[i] / epsilon));
}

bool HKEnsemble::record_valid(std::size_t m) const {
  if (mode == SampleMode::Expectation) return valid[2 * m] && valid[2 * m + 1];
  return valid[m] != 0;
}

std::size_t HKEnsemble::valid_records() const {
  std::size_t n = 0;
  for (std::size_t m = 0; m < size(); ++m) n += record_valid(m) ? 1 : 0;
  return n;
}

void HKEnsemble::reserve(std::size_t n) {
  centers.reserve(n * 2 * static_cast<std::size_t>(d));
  r0.reserve(n);
  action.reserve(n);
  prefactor.reserve(n);
  theta.reserve(n);
  valid.reserve(n);
}

void HKEnsemble::push_back(std::span<const double> z, Complex r0_value, double s, Complex u, double th) {
  centers.insert(centers.end(), z.begin(), z.end());
  r0.push_back(r0_value);
  action.push_back(s);
  prefactor.push_back(u);
  theta.push_back(th);
  valid.push_back(1);
}

HKEnsemble concatenate(std::span<const HKEnsemble> parts) {
  if (parts.empty()) throw InvalidArgument("nothing to concatenate");
  HKEnsemble out;
  out.t = parts.front().t;
  out.epsilon = parts.front().epsilon;
  out.d = parts.front().d;
  out.mode = parts.front().mode;
  for (const auto& e : parts) {
    if (e.d != out.d || e.epsilon != out.epsilon || e.mode != out.mode) {
      throw InvalidArgument("ensembles differ in dimension, epsilon or mode");
    }
    out.centers.insert(out.centers.end(), e.centers.begin(), e.centers.end());
    out.r0.insert(out.r0.end(), e.r0.begin(), e.r0.end());
    out.action.insert(out.action.end(), e.action.begin(), e.action.end());
    out.prefactor.insert(out.prefactor.end(), e.prefactor.begin(), e.prefactor.end());
    out.theta.insert(out.theta.end(), e.theta.begin(), e.theta.end());
    out.valid.insert(out.valid.end(), e.valid.begin(), e.valid.end());
    out.jacobians.insert(out.jacobians.end(), e.jacobians.begin(), e.jacobians.end());
  }
  return out;
}

}  // namespace hk
