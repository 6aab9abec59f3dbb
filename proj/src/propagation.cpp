#include "hk/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hk/error.hpp"
#include "hk/parallel.hpp"

namespace hk {

std::vector<std::size_t> snapshot_steps(std::size_t steps, std::size_t stride) {
  if (stride == 0) throw InvalidArgument("snapshot stride must be >= 1");
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k <= steps; k += stride) out.push_back(k);
  if (out.back() != steps) out.push_back(steps);
  return out;
}

namespace {

constexpr std::size_t kChunk = 256;

HKEnsemble snapshot(const SamplePlan& plan, const std::vector<TrajectoryState>& states,
                    const std::vector<std::uint8_t>& alive, double t, bool keep_jacobians) {
  HKEnsemble e;
  e.t = t;
  e.epsilon = plan.epsilon;
  e.d = plan.d;
  e.mode = plan.mode;
  e.reserve(states.size());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < states.size(); ++i) {
    const auto& s = states[i];
    if (alive[i]) {
      e.push_back(s.z, plan.r0_values[i], s.action(), s.hk_factor(), s.prefactor.theta);
    } else {
      std::vector<double> dead(s.z.size(), nan);
      e.push_back(dead, plan.r0_values[i], nan, Complex(nan, nan), nan);
      e.valid.back() = 0;
    }
    if (keep_jacobians) e.jacobians.insert(e.jacobians.end(), s.jacobian.begin(), s.jacobian.end());
  }
  return e;
}

}  // namespace

void propagate_plan(const SamplePlan& plan, const IntegratorSpec& spec,
                    const SeparableHamiltonian& H, const PropagationOptions& options,
                    const SnapshotSink& sink) {
  spec.validate();
  if (H.dim() != plan.d) throw InvalidArgument("Hamiltonian and sample plan dimensions differ");
  const std::size_t steps = step_count(options.t_final, spec.tau);
  const auto marks = snapshot_steps(steps, options.snapshot_stride);

  const std::size_t n = plan.rows();
  std::vector<TrajectoryState> states;
  states.reserve(n);
  for (std::size_t i = 0; i < n; ++i) states.push_back(TrajectoryState::initial(plan.row(i)));
  std::vector<std::uint8_t> alive(n, 1);

  sink(snapshot(plan, states, alive, 0.0, options.keep_jacobians));
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  for (std::size_t mark = 1; mark < marks.size(); ++mark) {
    const std::size_t from = marks[mark - 1];
    const std::size_t to = marks[mark];
    parallel_for(chunks, options.workers, [&](std::size_t chunk) {
      StepWorkspace ws(plan.d);
      const std::size_t end = std::min(n, (chunk + 1) * kChunk);
      for (std::size_t i = chunk * kChunk; i < end; ++i) {
        if (!alive[i]) continue;
        auto& s = states[i];
        for (std::size_t k = from; k < to; ++k) {
          try {
            composition_step(s, spec, H, ws);
            if (!s.finite()) throw Error("non-finite trajectory state");
          } catch (const Error& err) {
            if (options.escape == EscapePolicy::DropAndRenormalise) {
              alive[i] = 0;
              break;
            }
            std::ostringstream msg;
            msg << "trajectory " << i << " failed at t=" << (static_cast<double>(k + 1) * spec.tau)
                << ": " << err.what();
            throw TrajectoryError(msg.str(), i, static_cast<double>(k + 1) * spec.tau);
          }
        }
        // Step-count based time avoids drift from repeated additions.
        s.t = static_cast<double>(to) * spec.tau;
      }
    });
    sink(snapshot(plan, states, alive, static_cast<double>(to) * spec.tau, options.keep_jacobians));
  }
}

std::vector<HKEnsemble> propagate_plan(const SamplePlan& plan, const IntegratorSpec& spec,
                                       const SeparableHamiltonian& H,
                                       const PropagationOptions& options) {
  std::vector<HKEnsemble> out;
  propagate_plan(plan, spec, H, options, [&](const HKEnsemble& e) { out.push_back(e); });
  return out;
}

}  // namespace hk
