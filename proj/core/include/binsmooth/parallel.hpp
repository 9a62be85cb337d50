#pragma once

#include <cstddef>
#include <functional>

namespace binsmooth {

/// Worker count: min(BINSMOOTH_THREADS, hardware_concurrency), at least 1.
unsigned worker_count();

/**
 * Runs fn(i) for i in [0, count) across workers.  Work items must write only
 * to their own slot of preallocated output, so results are identical for any
 * worker count; exceptions are captured and rethrown on the caller thread.
 */
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

} // namespace binsmooth
