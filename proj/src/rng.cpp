#include "voxkit/rng.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace voxkit {

std::vector<size_t> Rng::sample_indices(size_t k, size_t n) {
  if (k > n) throw std::invalid_argument("sample_indices: k > n");
  std::vector<size_t> pool(n);
  std::iota(pool.begin(), pool.end(), size_t{0});
  // Partial Fisher-Yates: after k swaps the prefix holds the sample.
  for (size_t i = 0; i < k; ++i) {
    std::swap(pool[i], pool[i + static_cast<size_t>(below(n - i))]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace voxkit
