#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>

namespace linext {

// Deterministic counter-based generator used for all matrix and source
// synthesis: "splitmix64 v1". Output i of the stream seeded with s is
// mix64(s + (i+1) * 0x9E3779B97F4A7C15), so any position is addressable
// in O(1) and the sequence is identical on every platform. The exact
// constants and per-generator draw orders are frozen in docs/FORMATS.md.
class SplitMix64 {
 public:
  using result_type = uint64_t;

  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  static constexpr uint64_t mix64(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  uint64_t next() { return mix64(state_ += kGamma); }

  /// Output at stream position `index` (0-based) without iterating.
  static constexpr uint64_t at(uint64_t seed, uint64_t index) {
    return mix64(seed + (index + 1) * kGamma);
  }

  /// Double in [0, 1) with 53 random mantissa bits.
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool next_bernoulli(double p) { return next_unit() < p; }

  /// Unbiased integer in [0, bound) via threshold rejection.
  uint64_t next_below(uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("next_below: bound must be positive");
    const uint64_t threshold = (~bound + 1) % bound;  // 2^64 mod bound
    for (;;) {
      const uint64_t x = next();
      if (x >= threshold) return x % bound;
    }
  }

  // UniformRandomBitGenerator interface, so <random> distributions accept it.
  uint64_t operator()() { return next(); }
  static constexpr uint64_t min() { return 0; }
  static constexpr uint64_t max() { return std::numeric_limits<uint64_t>::max(); }

 private:
  static constexpr uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
  uint64_t state_;
};

}  // namespace linext
