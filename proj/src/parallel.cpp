#include "voxkit/parallel.hpp"

#include <algorithm>
#include <thread>
#include <vector>

namespace voxkit {

int default_thread_count() {
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(std::int64_t begin, std::int64_t end, int threads,
                  const std::function<void(std::int64_t, std::int64_t)>& body) {
  if (end <= begin) return;
  if (threads <= 0) threads = default_thread_count();
  const std::int64_t n = end - begin;
  const std::int64_t workers = std::min<std::int64_t>(threads, n);
  if (workers <= 1) {
    body(begin, end);
    return;
  }
  const std::int64_t chunk = (n + workers - 1) / workers;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers) - 1);
  for (std::int64_t w = 1; w < workers; ++w) {
    const std::int64_t lo = begin + w * chunk;
    const std::int64_t hi = std::min(end, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&body, lo, hi] { body(lo, hi); });
  }
  body(begin, std::min(end, begin + chunk));
  for (auto& t : pool) t.join();
}

}  // namespace voxkit
