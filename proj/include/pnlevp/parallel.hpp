#pragma once

#include <cstddef>
#include <functional>

namespace pnlevp {

/// Worker count: `requested` if positive, otherwise PNLEVP_THREADS
/// (0 or unset means hardware concurrency).
unsigned resolve_workers(unsigned requested = 0);

/// Runs body(i) for i in [0, count) on up to `workers` threads. Each index is
/// processed by exactly one thread; the first exception is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body,
                  unsigned workers);

}  // namespace pnlevp
