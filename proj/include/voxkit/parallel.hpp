#pragma once

#include <cstdint>
#include <functional>

namespace voxkit {

// Number of worker threads to use when the caller passes threads <= 0.
int default_thread_count();

// Splits [begin, end) into at most `threads` contiguous ranges and runs
// `body(range_begin, range_end)` on each, one thread per range. The partition
// depends only on (begin, end, threads), so results that accumulate per-range
// are reproducible for a fixed thread count.
void parallel_for(std::int64_t begin, std::int64_t end, int threads,
                  const std::function<void(std::int64_t, std::int64_t)>& body);

}  // namespace voxkit
