#pragma once

#include <cstdint>
#include <vector>

namespace qdc {

// Deterministic, platform-independent random numbers. Splits and synthetic
// test data must reproduce bit-for-bit across machines, so we pin the
// generator instead of using std::mt19937 distributions (whose outputs are
// implementation-defined for floating point).
//
// splitmix64 is used for seeding, xoshiro256** for the stream itself.
// References: Blackman & Vigna, "Scrambled linear pseudorandom number
// generators" (the public-domain reference implementations).

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

class Xoshiro256 {
 public:
  explicit Xoshiro256(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& w : s_) w = splitmix64_next(sm);
  }

  // Stream dedicated to one (seed, stream_index) pair; used for
  // per-repetition shuffles.
  Xoshiro256(std::uint64_t seed, std::uint64_t stream_index)
      : Xoshiro256(mix(seed, stream_index)) {}

  std::uint64_t next_u64() {
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

  // Uniform in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // Unbiased integer in [0, bound) by rejection.
  std::uint64_t next_below(std::uint64_t bound) {
    if (bound == 0) return 0;
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

  // Standard normal via Box-Muller (deterministic given the stream).
  double next_gaussian();

  static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream_index) {
    std::uint64_t sm = seed;
    (void)splitmix64_next(sm);
    sm ^= 0xA3EC647659359ACDull * (stream_index + 1);
    return splitmix64_next(sm);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4]{};
};

// Fisher-Yates shuffle of 0..n-1.
std::vector<std::size_t> random_permutation(std::size_t n, Xoshiro256& rng);

}  // namespace qdc
