#pragma once

#include <cstdint>
#include <limits>

namespace martinq {

/// xoshiro256** generator whose state is derived by a counter-based hash of
/// (master seed, stream index). Trajectory i of an ensemble always draws from
/// `Rng::stream(seed, i)`, so serial and parallel runs see identical numbers.
class Rng {
 public:
  using result_type = std::uint64_t;

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  static Rng stream(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t key = mix(seed ^ mix(index + 0x9E3779B97F4A7C15ULL));
    Rng rng;
    for (auto& word : rng.s_) {
      key += 0x9E3779B97F4A7C15ULL;
      word = mix(key);
    }
    return rng;
  }

  /// Derives an independent master seed for a named sub-experiment.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t tag) { return mix(seed + mix(tag ^ 0xD1B54A32D192ED03ULL)); }

  result_type operator()() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform integer on [0, n).
  std::uint64_t below(std::uint64_t n) {
    // Lemire's multiply-shift; the residual bias is below 2^-64 * n.
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>((*this)()) * n) >> 64);
  }

 private:
  Rng() = default;

  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t s_[4]{};
};

}  // namespace martinq
