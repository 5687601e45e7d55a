#pragma once

#include <cstdint>

#include "xor3/bitword.hpp"

namespace xor3 {

/// Deterministic pseudo random generator (splitmix64). The stream depends
/// only on the seed value, never on the platform, so generated instances and
/// sampled hash functions are reproducible byte for byte.
struct Rng {
  std::uint64_t state;

  explicit constexpr Rng(std::uint64_t seed) : state(seed) {}

  constexpr std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform value in [0, bound), bound >= 1. Rejection sampling over the
  /// smallest covering power of two keeps the distribution exact.
  constexpr std::uint64_t below(std::uint64_t bound) {
    if (bound <= 1) return 0;
    std::uint64_t mask = ~std::uint64_t{0};
    if (std::uint64_t p = std::bit_ceil(bound); p != 0) mask = p - 1;
    for (;;) {
      std::uint64_t v = next() & mask;
      if (v < bound) return v;
    }
  }

  constexpr bool coin() { return next() & 1u; }

  /// Derives an independent child seed; salts give distinct streams.
  static constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t salt) {
    Rng r(seed ^ (salt * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL));
    return r.next();
  }
};

template <std::size_t L>
BitWord<L> random_word(Rng& rng, unsigned width) {
  BitWord<L> x;
  for (std::size_t i = 0; i < L; ++i) x.limb[i] = rng.next();
  return mask_to_width(x, width);
}

}  // namespace xor3
