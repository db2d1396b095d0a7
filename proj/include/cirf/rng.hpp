#pragma once

#include <cstdint>
#include <random>

namespace cirf {

using Rng = std::mt19937_64;

// splitmix64; used to derive independent per-record / per-subject seeds so
// that parallel or reordered generation cannot change the output stream.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0,
                                    std::uint64_t c = 0) {
  std::uint64_t s = mix64(base ^ 0x6a09e667f3bcc908ULL);
  s = mix64(s ^ a);
  s = mix64(s ^ b);
  return mix64(s ^ c);
}

// Unbiased draw from [lo, hi]; avoids std::uniform_int_distribution, whose
// output sequence differs between standard-library implementations.
inline std::uint64_t uniform_u64(Rng& rng, std::uint64_t lo, std::uint64_t hi) {
  std::uint64_t range = hi - lo;
  if (range == UINT64_MAX) return rng();
  std::uint64_t n = range + 1;
  std::uint64_t reject_above = UINT64_MAX - UINT64_MAX % n - 1;
  for (;;) {
    std::uint64_t r = rng();
    if (r <= reject_above) return lo + r % n;
  }
}

inline bool bernoulli(Rng& rng, double prob) {
  // 53-bit uniform in [0,1)
  return (rng() >> 11) * 0x1.0p-53 < prob;
}

}  // namespace cirf
