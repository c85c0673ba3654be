#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>

namespace fairdiv {

// splitmix64 finalizer. Good avalanche, cheap, and stable across platforms;
// used to derive independent-looking seeds from (seed, salt) pairs.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives a child seed from a parent seed and a salt (trial index, item
// index, ...). Children with different salts behave as unrelated streams.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  return mix64(mix64(seed) ^ mix64(salt ^ 0xd1b54a32d192ed03ULL));
}

// Deterministic RNG handle. mt19937_64 is bit-specified by the standard, so
// the same seed yields the same stream on every platform. All derived values
// (doubles, bounded ints) are produced by our own arithmetic rather than
// std::uniform_*_distribution, whose output is implementation-defined.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform double in [0, 1), 53 random mantissa bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform double in the open interval (0, 1); safe for inverse-CDF use.
  double next_open01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Uniform integer in [0, bound) via rejection sampling (exactly unbiased).
  std::uint64_t next_below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("next_below: bound must be positive");
    const std::uint64_t threshold = (0 - bound) % bound;  // 2^64 mod bound
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace fairdiv
