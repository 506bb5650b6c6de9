#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace voxkit {

// Seeded generator with self-contained distributions. std::mt19937_64 output
// is fixed by the standard, and the draw methods below avoid the standard
// distribution objects (whose sequences are implementation-defined), so the
// same seed yields the same stream on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n), rejection-sampled to avoid modulo bias.
  std::uint64_t below(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[static_cast<size_t>(below(i))]);
    }
  }

  // k distinct indices from [0, n), returned sorted.
  std::vector<size_t> sample_indices(size_t k, size_t n);

 private:
  std::mt19937_64 engine_;
};

}  // namespace voxkit
