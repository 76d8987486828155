#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace gfgn {

// SplitMix64 step: used for seeding and for deriving independent substreams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// xoshiro256++ — a small, fast xorshift-family generator with a 256-bit state.
// Seeded through SplitMix64 so that nearby seeds give unrelated streams.
// All draws are elementary integer/IEEE-754 ops, so sequences are identical
// across platforms and build types.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : s_) word = splitmix64(sm);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform double in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // Unbiased integer in [0, bound) via rejection sampling.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;  // 2^64 mod bound
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

  // Standard normal via Box-Muller (no caching: two uniforms per draw, so the
  // stream position is a pure function of the number of calls).
  double normal() {
    double u1 = next_double();
    while (u1 <= 0.0) u1 = next_double();
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return r * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4];
};

// FNV-1a over a label, used to give each purpose ("init", "dropout", ...) its
// own seed domain.
inline std::uint64_t hash_label(std::string_view label) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (const char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

// Derive a child seed from (base, purpose label, indices). Mixing is performed
// by chained SplitMix64 steps, so substreams are statistically independent of
// one another and of the base stream.
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view label, std::uint64_t a = 0,
                                 std::uint64_t b = 0) {
  std::uint64_t state = base ^ hash_label(label);
  std::uint64_t h = splitmix64(state);
  state ^= a * 0x9E3779B97F4A7C15ULL + 0x243F6A8885A308D3ULL;
  h ^= splitmix64(state);
  state ^= b * 0xD1B54A32D192ED03ULL + 0x452821E638D01377ULL;
  h ^= splitmix64(state);
  return h;
}

}  // namespace gfgn
