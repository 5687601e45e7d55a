#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace xor3 {

/// Machine word of a simulated word RAM with configurable width W (up to 512
/// bits). All arithmetic, logical and shift operations are exact over W bits
/// and bump a thread-local counter, so algorithms built on SimWords can
/// report word-operation counts. Limbs are least significant first; raw limb
/// access is uncounted and reserved for building precomputed constants and
/// for test inspection.
class SimWord {
 public:
  static constexpr unsigned kMaxBits = 512;
  static constexpr unsigned kMaxLimbs = kMaxBits / 64;

  SimWord() = default;

  explicit SimWord(unsigned width) : width_(width) {
    if (width < 1 || width > kMaxBits)
      throw std::invalid_argument("simulated width out of range (1..512)");
    nlimb_ = (width + 63) / 64;
  }

  static SimWord from_u64(unsigned width, std::uint64_t v) {
    SimWord w(width);
    w.limb_[0] = v;
    w.truncate();
    return w;
  }

  unsigned width() const { return width_; }
  unsigned limb_count() const { return nlimb_; }
  std::uint64_t limb(unsigned i) const { return limb_[i]; }
  void set_limb(unsigned i, std::uint64_t v) {
    limb_[i] = v;
    if (i + 1 == nlimb_) truncate();
  }

  static std::uint64_t& op_counter() {
    thread_local std::uint64_t count = 0;
    return count;
  }

  friend SimWord operator&(const SimWord& a, const SimWord& b) {
    SimWord r = a.blank(b);
    for (unsigned i = 0; i < r.nlimb_; ++i) r.limb_[i] = a.limb_[i] & b.limb_[i];
    ++op_counter();
    return r;
  }
  friend SimWord operator|(const SimWord& a, const SimWord& b) {
    SimWord r = a.blank(b);
    for (unsigned i = 0; i < r.nlimb_; ++i) r.limb_[i] = a.limb_[i] | b.limb_[i];
    ++op_counter();
    return r;
  }
  friend SimWord operator^(const SimWord& a, const SimWord& b) {
    SimWord r = a.blank(b);
    for (unsigned i = 0; i < r.nlimb_; ++i) r.limb_[i] = a.limb_[i] ^ b.limb_[i];
    ++op_counter();
    return r;
  }
  SimWord operator~() const {
    SimWord r = *this;
    for (unsigned i = 0; i < nlimb_; ++i) r.limb_[i] = ~limb_[i];
    r.truncate();
    ++op_counter();
    return r;
  }

  SimWord operator<<(unsigned s) const {
    SimWord r(width_);
    if (s < width_) {
      unsigned ls = s / 64, bs = s % 64;
      for (unsigned i = nlimb_; i-- > 0;) {
        std::uint64_t v = i >= ls ? limb_[i - ls] << bs : 0;
        if (bs && i > ls) v |= limb_[i - ls - 1] >> (64 - bs);
        r.limb_[i] = v;
      }
      r.truncate();
    }
    ++op_counter();
    return r;
  }

  SimWord operator>>(unsigned s) const {
    SimWord r(width_);
    if (s < width_) {
      unsigned ls = s / 64, bs = s % 64;
      for (unsigned i = 0; i < nlimb_; ++i) {
        std::uint64_t v = i + ls < nlimb_ ? limb_[i + ls] >> bs : 0;
        if (bs && i + ls + 1 < nlimb_) v |= limb_[i + ls + 1] << (64 - bs);
        r.limb_[i] = v;
      }
    }
    ++op_counter();
    return r;
  }

  friend SimWord operator+(const SimWord& a, const SimWord& b) {
    SimWord r = a.blank(b);
    unsigned __int128 carry = 0;
    for (unsigned i = 0; i < r.nlimb_; ++i) {
      unsigned __int128 s = carry + a.limb_[i] + b.limb_[i];
      r.limb_[i] = std::uint64_t(s);
      carry = s >> 64;
    }
    r.truncate();
    ++op_counter();
    return r;
  }

  friend SimWord operator-(const SimWord& a, const SimWord& b) {
    SimWord r = a.blank(b);
    std::uint64_t borrow = 0;
    for (unsigned i = 0; i < r.nlimb_; ++i) {
      unsigned __int128 d = (unsigned __int128)a.limb_[i] - b.limb_[i] - borrow;
      r.limb_[i] = std::uint64_t(d);
      borrow = std::uint64_t(d >> 64) ? 1 : 0;
    }
    r.truncate();
    ++op_counter();
    return r;
  }

  /// Product modulo 2^W.
  friend SimWord mul_low(const SimWord& a, const SimWord& b) {
    SimWord r = a.blank(b);
    for (unsigned i = 0; i < r.nlimb_; ++i) {
      unsigned __int128 carry = 0;
      for (unsigned j = 0; i + j < r.nlimb_; ++j) {
        unsigned __int128 cur =
            (unsigned __int128)a.limb_[i] * b.limb_[j] + r.limb_[i + j] + carry;
        r.limb_[i + j] = std::uint64_t(cur);
        carry = cur >> 64;
      }
    }
    r.truncate();
    ++op_counter();
    return r;
  }

  friend bool operator==(const SimWord& a, const SimWord& b) {
    ++op_counter();
    if (a.width_ != b.width_) return false;
    for (unsigned i = 0; i < a.nlimb_; ++i)
      if (a.limb_[i] != b.limb_[i]) return false;
    return true;
  }

  bool is_zero() const {
    ++op_counter();
    for (unsigned i = 0; i < nlimb_; ++i)
      if (limb_[i] != 0) return false;
    return true;
  }

  /// Low 64 bits, uncounted (register read).
  std::uint64_t low() const { return limb_[0]; }

 private:
  SimWord blank(const SimWord& other) const {
    if (width_ != other.width_)
      throw std::invalid_argument("simulated word width mismatch");
    SimWord r(width_);
    return r;
  }

  void truncate() {
    unsigned rem = width_ % 64;
    if (rem) limb_[nlimb_ - 1] &= (std::uint64_t{1} << rem) - 1;
    for (unsigned i = nlimb_; i < kMaxLimbs; ++i) limb_[i] = 0;
  }

  std::array<std::uint64_t, kMaxLimbs> limb_{};
  unsigned width_ = 0;
  unsigned nlimb_ = 0;
};

/// Scope helper: ops consumed since construction.
class SimOpScope {
 public:
  SimOpScope() : start_(SimWord::op_counter()) {}
  std::uint64_t consumed() const { return SimWord::op_counter() - start_; }

 private:
  std::uint64_t start_;
};

}  // namespace xor3
