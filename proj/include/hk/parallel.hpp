#pragma once

#include <cstddef>
#include <functional>

namespace hk {

/// Resolves a configured worker count; 0 means the available hardware parallelism.
unsigned resolve_workers(unsigned requested);

/// Runs body(chunk) for chunk in [0, chunks) on up to `workers` threads.
/// Each chunk must write only to its own slots. If any chunk throws, the
/// exception of the lowest-numbered failing chunk is rethrown after all
/// workers have stopped, so the reported error does not depend on scheduling.
void parallel_for(std::size_t chunks, unsigned workers, const std::function<void(std::size_t)>& body);

}  // namespace hk
