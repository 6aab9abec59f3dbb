#pragma once

#include <functional>
#include <vector>

#include "hk/ensemble.hpp"
#include "hk/hamiltonian.hpp"
#include "hk/integrator.hpp"
#include "hk/sampling.hpp"

namespace hk {

enum class EscapePolicy {
  Abort,                ///< throw TrajectoryError on the first non-finite state
  DropAndRenormalise,   ///< mark the trajectory invalid and continue
};

struct PropagationOptions {
  double t_final = 0.0;
  std::size_t snapshot_stride = 1;
  unsigned workers = 0;
  EscapePolicy escape = EscapePolicy::Abort;
  bool keep_jacobians = false;
};

using SnapshotSink = std::function<void(const HKEnsemble&)>;

/// Propagates every plan node independently from t = 0 and hands an ensemble
/// to `sink` at step 0, at every multiple of snapshot_stride, and at the
/// final step. Output rows keep the plan order, and results do not depend on
/// the worker count.
void propagate_plan(const SamplePlan& plan, const IntegratorSpec& spec,
                    const SeparableHamiltonian& H, const PropagationOptions& options,
                    const SnapshotSink& sink);

std::vector<HKEnsemble> propagate_plan(const SamplePlan& plan, const IntegratorSpec& spec,
                                       const SeparableHamiltonian& H,
                                       const PropagationOptions& options);

/// Snapshot step indices emitted for n steps with the given stride.
std::vector<std::size_t> snapshot_steps(std::size_t steps, std::size_t stride);

}  // namespace hk
