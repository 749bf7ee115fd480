#pragma once

#include <cstddef>
#include <functional>

namespace jetx {

/// Number of workers: hardware concurrency, capped by JETX_THREADS when set.
int worker_count();

/// Runs body(i) for i in [0, n) on worker_count() threads with static
/// contiguous chunks. Callers write results to index-addressed slots, so the
/// outcome does not depend on the number of workers. The first exception
/// thrown by any worker is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace jetx
