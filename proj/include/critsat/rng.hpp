#pragma once

// Reproducible, splittable random streams.
//
// A stream is identified by (master seed, stream index). Both are hashed
// through SplitMix64 into the 256-bit state of a xoshiro256** generator.
// Bounded integers use Lemire's multiply-shift rejection and doubles take
// the top 53 bits, so the output sequence does not depend on the standard
// library's distribution implementations and is identical on every platform.
//
// Derivation (stable across versions):
//   key   = splitmix(splitmix(seed) ^ splitmix(index + 0x632BE59BD9B4E019))
//   state = splitmix(key + i * 0x9E3779B97F4A7C15) for i = 0..3

#include <bit>
#include <cstdint>
#include <limits>

namespace critsat {

inline constexpr std::uint64_t splitmix64_mix(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t key = splitmix64_mix(splitmix64_mix(seed) ^ splitmix64_mix(index + 0x632BE59BD9B4E019ULL));
    for (auto& word : s_) {
      word = splitmix64_mix(key);
      key += 0x9E3779B97F4A7C15ULL;
    }
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return next(); }

  std::uint64_t next() {
    const std::uint64_t result = std::rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = std::rotl(s_[3], 45);
    return result;
  }

  // Uniform on [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound) {
    unsigned __int128 product = static_cast<unsigned __int128>(next()) * bound;
    auto low = static_cast<std::uint64_t>(product);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        product = static_cast<unsigned __int128>(next()) * bound;
        low = static_cast<std::uint64_t>(product);
      }
    }
    return static_cast<std::uint64_t>(product >> 64);
  }

  // Uniform on [0, 1).
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool coin() { return (next() >> 63) != 0; }

 private:
  std::uint64_t s_[4]{};
};

inline RngStream derive_stream(std::uint64_t master_seed, std::uint64_t index) {
  return RngStream(master_seed, index);
}

}  // namespace critsat
