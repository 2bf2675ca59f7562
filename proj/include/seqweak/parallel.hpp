#pragma once

#include <cstddef>
#include <functional>

namespace seqweak {

// Worker count: SEQWEAK_THREADS if set to a positive integer, otherwise the
// hardware concurrency (at least 1).
std::size_t default_thread_count();

// Calls fn(i) for every i in [0, n). Each index is visited exactly once, so
// results written to slot i are independent of the thread count. The first
// exception thrown by any call is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace seqweak
