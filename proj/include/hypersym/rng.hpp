#pragma once

// Seeded pseudo-random number generation with stable output across
// platforms and compilers. std::mt19937 is portable but the standard
// distributions (and std::shuffle) are implementation-defined, which would
// break byte-identical reproducibility of seeded pipelines, so sampling
// primitives are implemented here directly on top of splitmix64.

#include <cstdint>
#include <vector>

namespace hypersym {

inline std::uint64_t splitmix64_step(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  // Derives an independent stream from a base seed; used so that parallel
  // or per-split sampling stays reproducible regardless of scheduling.
  static Rng stream(std::uint64_t seed, std::uint64_t stream_index) {
    std::uint64_t s = seed;
    (void)splitmix64_step(s);
    s ^= 0x94d049bb133111ebull * (stream_index + 1);
    return Rng(splitmix64_step(s));
  }

  std::uint64_t next() { return splitmix64_step(state_); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool bernoulli(double prob) { return uniform() < prob; }

  // Uniform integer in [0, bound), bound >= 1, without modulo bias.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;  // 2^64 mod bound
    for (;;) {
      const std::uint64_t r = next();
      if (r >= threshold) return r % bound;
    }
  }

  // Fisher-Yates; deterministic replacement for std::shuffle.
  template <typename T>
  void shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  std::uint64_t state_;
};

}  // namespace hypersym
