#pragma once

#include <cstddef>
#include <functional>

namespace scorelife {

/// Worker count: SCORELIFE_THREADS if set and positive, else hardware concurrency.
unsigned worker_count();

/// Calls body(i) for i in [0, n), statically partitioned across workers.
/// Each index is visited exactly once; callers write results by index, so
/// the outcome does not depend on the thread count.  The first exception
/// thrown by any worker is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace scorelife
