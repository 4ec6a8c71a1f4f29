#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace auxinet {

// Deterministic random source with bit-identical output across platforms.
//
// std::mt19937_64 itself is fully specified by the standard, but the
// <random> distributions are implementation-defined, so uniform doubles are
// mapped from the raw 64-bit stream directly (53-bit mantissa trick).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Named substream: decouples consumers so adding a new randomised field
  // does not shift the draws of existing ones.
  Rng(std::uint64_t seed, std::string_view stream)
      : engine_(mix(seed, fnv1a(stream))) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  static constexpr std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
    return h;
  }

  // splitmix64 finalizer, used to spread (seed, stream-tag) pairs apart.
  static constexpr std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b | 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::mt19937_64 engine_;
};

}  // namespace auxinet
