#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace causalsel {

// Seedable generator with output that does not depend on the standard
// library implementation: the engine is std::mt19937_64 (its sequence is
// fixed by the standard) and every distribution is written out here instead
// of using the implementation-defined <random> distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Unbiased integer in [0, bound).
  std::uint64_t uniform_index(std::uint64_t bound);

  // Standard normal via the Box-Muller transform; the spare value is cached.
  double normal();

  bool bernoulli(double p) { return uniform() < p; }

  template <typename T>
  void shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const std::size_t j = uniform_index(i);
      std::swap(values[i - 1], values[j]);
    }
  }

  std::vector<std::size_t> permutation(std::size_t n);

  // `k` distinct indices drawn uniformly from [0, n), in draw order.
  std::vector<std::size_t> sample_without_replacement(std::size_t n,
                                                      std::size_t k);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// SplitMix64 finalizer; used to derive independent child seeds.
std::uint64_t mix_seed(std::uint64_t value);

// Child seed for the `index`-th stream under `parent`. Independent of the
// order in which children are requested.
std::uint64_t child_seed(std::uint64_t parent, std::uint64_t index);

}  // namespace causalsel
