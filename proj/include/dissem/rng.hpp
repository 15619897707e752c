// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

namespace dissem {

// Deterministic RNG stack used by every randomized component:
// xoshiro256** seeded through SplitMix64, bounded draws via Lemire's
// multiply-shift rejection. Replication r of master seed s draws its own
// stream from splitmix(s + (r+1) * 0x9E3779B97F4A7C15). All of this is
// fixed by this file, so equal seeds reproduce equal runs on any build.
struct SplitMix64 {
  std::uint64_t state;
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
};

class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed) {
    SplitMix64 sm{seed};
    for (auto& w : s_) w = sm.next();
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~0ULL; }

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

  /// Unbiased uniform draw from [0, n), n >= 1.
  std::uint64_t below(std::uint64_t n) {
    unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * n;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
      std::uint64_t t = (0 - n) % n;
      while (lo < t) {
        m = static_cast<unsigned __int128>((*this)()) * n;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t s_[4];
};

inline std::uint64_t replication_seed(std::uint64_t master,
                                      std::uint64_t replication) {
  SplitMix64 sm{master + (replication + 1) * 0x9E3779B97F4A7C15ULL};
  return sm.next();
}

/// Independent stream per sweep grid point, order-insensitive.
inline std::uint64_t grid_seed(std::uint64_t master, std::uint64_t a,
                               std::uint64_t b, std::uint64_t c) {
  SplitMix64 sm{master ^ (a * 0x9E3779B97F4A7C15ULL)};
  std::uint64_t h = sm.next();
  SplitMix64 sm2{h + b * 0xBF58476D1CE4E5B9ULL + c * 0x94D049BB133111EBULL};
  return sm2.next();
}

}  // namespace dissem
