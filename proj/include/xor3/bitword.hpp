#pragma once

#include <array>
#include <bit>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace xor3 {

inline constexpr unsigned kMaxKeyBits = 512;

/// Fixed-width bit string of up to 64*Limbs bits. Limbs are stored most
/// significant first, so the default lexicographic order on the limb array
/// equals unsigned integer order, which in turn equals lexicographic order
/// on the bit string read MSB-first. Bits above the logical width are zero.
template <std::size_t Limbs>
struct BitWord {
  static_assert(Limbs >= 1 && Limbs <= 8, "key limb count out of range");

  std::array<std::uint64_t, Limbs> limb{};

  friend constexpr auto operator<=>(const BitWord&, const BitWord&) = default;

  constexpr BitWord operator^(const BitWord& o) const {
    BitWord r;
    for (std::size_t i = 0; i < Limbs; ++i) r.limb[i] = limb[i] ^ o.limb[i];
    return r;
  }
  constexpr BitWord& operator^=(const BitWord& o) {
    for (std::size_t i = 0; i < Limbs; ++i) limb[i] ^= o.limb[i];
    return *this;
  }
  constexpr BitWord operator&(const BitWord& o) const {
    BitWord r;
    for (std::size_t i = 0; i < Limbs; ++i) r.limb[i] = limb[i] & o.limb[i];
    return r;
  }

  constexpr bool is_zero() const {
    for (std::size_t i = 0; i < Limbs; ++i)
      if (limb[i] != 0) return false;
    return true;
  }

  /// Bit positions count from the least significant end.
  constexpr bool bit(unsigned i) const {
    return (limb[Limbs - 1 - i / 64] >> (i % 64)) & 1u;
  }
  constexpr void set_bit(unsigned i) {
    limb[Limbs - 1 - i / 64] |= std::uint64_t{1} << (i % 64);
  }

  constexpr unsigned popcount() const {
    unsigned c = 0;
    for (std::size_t i = 0; i < Limbs; ++i) c += unsigned(std::popcount(limb[i]));
    return c;
  }

  static constexpr BitWord zero() { return BitWord{}; }

  static constexpr BitWord from_u64(std::uint64_t v) {
    BitWord r;
    r.limb[Limbs - 1] = v;
    return r;
  }

  /// Low 64 bits.
  constexpr std::uint64_t to_u64() const { return limb[Limbs - 1]; }

  /// True if all bits at positions >= width are clear.
  constexpr bool fits_width(unsigned width) const {
    for (unsigned i = width; i < 64 * Limbs; ++i)
      if (bit(i)) return false;
    return true;
  }
};

template <std::size_t L>
constexpr unsigned parity_and(const BitWord<L>& a, const BitWord<L>& b) {
  std::uint64_t acc = 0;
  for (std::size_t i = 0; i < L; ++i) acc ^= a.limb[i] & b.limb[i];
  return unsigned(std::popcount(acc)) & 1u;
}

/// Clears every bit at position >= width.
template <std::size_t L>
constexpr BitWord<L> mask_to_width(BitWord<L> x, unsigned width) {
  for (unsigned i = 0; i < 64 * L; i += 64) {
    std::size_t idx = L - 1 - i / 64;
    if (i + 64 <= width) continue;
    if (i >= width)
      x.limb[idx] = 0;
    else
      x.limb[idx] &= (std::uint64_t{1} << (width - i)) - 1;
  }
  return x;
}

inline constexpr char kHexDigits[] = "0123456789abcdef";

inline unsigned hex_digit_count(unsigned width) { return (width + 3) / 4; }

/// Hex digit j (counting from the least significant) covers bits [4j, 4j+4).
template <std::size_t L>
std::string to_hex(const BitWord<L>& x, unsigned width) {
  unsigned digits = hex_digit_count(width);
  std::string s(digits, '0');
  for (unsigned j = 0; j < digits; ++j) {
    unsigned b = 4 * j;
    unsigned nib = unsigned((x.limb[L - 1 - b / 64] >> (b % 64)) & 0xf);
    s[digits - 1 - j] = kHexDigits[nib];
  }
  return s;
}

template <std::size_t L>
BitWord<L> from_hex(const std::string& s, unsigned width) {
  unsigned digits = hex_digit_count(width);
  if (s.size() != digits)
    throw std::invalid_argument("hex word '" + s + "' must have " +
                                std::to_string(digits) + " digits for width " +
                                std::to_string(width));
  BitWord<L> x{};
  for (unsigned pos = 0; pos < digits; ++pos) {
    char c = s[pos];
    unsigned nib;
    if (c >= '0' && c <= '9')
      nib = unsigned(c - '0');
    else if (c >= 'a' && c <= 'f')
      nib = unsigned(c - 'a') + 10;
    else
      throw std::invalid_argument("hex word '" + s +
                                  "': expected lowercase hex digits");
    unsigned b = 4 * (digits - 1 - pos);
    x.limb[L - 1 - b / 64] |= std::uint64_t{nib} << (b % 64);
  }
  if (!x.fits_width(width))
    throw std::invalid_argument("hex word '" + s + "' does not fit width " +
                                std::to_string(width));
  return x;
}

}  // namespace xor3
