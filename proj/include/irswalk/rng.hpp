#pragma once

// Keyed random streams.  Every replicate owns a stream derived from
// (seed, tag, replicate), so results do not depend on how work is
// scheduled across threads.

#include <cstdint>

namespace irswalk {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t mix_keys(std::uint64_t a, std::uint64_t b) {
  return splitmix64(a ^ (0x9e3779b97f4a7c15ULL + (b << 6) + (b >> 2)) ^ splitmix64(b));
}

// xoshiro256++ seeded through splitmix64.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t k1 = 0, std::uint64_t k2 = 0,
               std::uint64_t k3 = 0) {
    std::uint64_t x = splitmix64(seed) ^ splitmix64(k1 * 0xd1342543de82ef95ULL + 1) ^
                      splitmix64(k2 * 0x2545f4914f6cdd1dULL + 2) ^
                      splitmix64(k3 * 0x9e6c63d0a0f3eb11ULL + 3);
    for (auto& w : s_) {
      x = splitmix64(x);
      w = x;
    }
  }

  std::uint64_t next() {
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

  // Unbiased integer in [0, n) (Lemire rejection).
  std::uint64_t below(std::uint64_t n) {
    __uint128_t m = static_cast<__uint128_t>(next()) * n;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
      const std::uint64_t thresh = (0 - n) % n;
      while (lo < thresh) {
        m = static_cast<__uint128_t>(next()) * n;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  // min_t required by uniform-int adaptors
  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~0ULL; }
  result_type operator()() { return next(); }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t s_[4];
};

// Stateless inclusion bit, consistent across consumers that agree on the key.
inline bool bernoulli_keyed(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                            double p) {
  const std::uint64_t h = splitmix64(mix_keys(mix_keys(seed, a), b));
  return static_cast<double>(h >> 11) * 0x1.0p-53 < p;
}

}  // namespace irswalk
