#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace pcve {

// mt19937_64's output sequence is fixed by the standard; the distribution
// adapters in <random> are not. Everything that must reproduce bit-for-bit
// across toolchains goes through these helpers instead.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform integer in [0, bound), rejection-sampled to avoid modulo bias.
  std::size_t index(std::size_t bound);

  // Uniform double in [0, 1) with 53 random bits.
  double unit();

  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = index(i);
      std::swap(items[i - 1], items[j]);
    }
  }

  // k distinct positions out of [0, n), in draw order (partial Fisher-Yates).
  std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k);

private:
  std::mt19937_64 engine_;
};

}  // namespace pcve
