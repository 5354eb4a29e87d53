#pragma once

#include <cstdint>
#include <functional>

namespace fpd {

// Worker cap from the FPD_THREADS environment variable. 0 or unset means
// hardware concurrency. Read once per process.
int thread_budget();

// Runs fn(i) for i in [0, n). Splits into contiguous chunks across up to
// thread_budget() workers. Calls nested inside a parallel region run serial,
// so callers can parallelize freely at any level. fn must only touch state
// owned by index i; results are deterministic regardless of worker count.
void parallel_for(std::int64_t n, const std::function<void(std::int64_t)>& fn);

} // namespace fpd
