#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "xor3/bitword.hpp"
#include "xor3/rng.hpp"

namespace xor3 {

/// A GF(2)-linear map {0,1}^ell -> {0,1}^mu given by a mu x ell matrix.
/// Linearity h(x ^ y) = h(x) ^ h(y) and h(0) = 0 hold by construction, and
/// a uniformly sampled matrix collides any fixed pair of distinct keys with
/// probability exactly 2^-mu.
///
/// The matrix is kept in two layouts: `rows` (one ell-bit word per output
/// bit) drives the row-wise evaluation, and `packed_columns` (all columns as
/// mu-bit values, several per 64-bit word) drives the column-wise and batch
/// evaluations. Matrix row i contributes result bit mu-1-i, i.e. hash values
/// read as bit strings in the same MSB-first order as the keys.
///
/// Hash outputs are capped at 64 bits; every range used here is far below.
template <std::size_t L>
struct LinearHash {
  unsigned ell = 0;
  unsigned mu = 0;
  std::vector<BitWord<L>> rows;
  std::vector<std::uint64_t> packed_columns;  // padded to a power-of-two
  unsigned col_stride = 1;                    // bits per packed column slot

  std::uint64_t mu_mask() const {
    return mu >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << mu) - 1;
  }
  unsigned padded_columns() const { return unsigned(std::bit_ceil(ell)); }
  unsigned slots_per_word() const { return 64 / col_stride; }

  /// Matrix entry (row i, column j), columns indexed MSB-first like the
  /// paper-and-pencil reading of a key as a bit string.
  bool entry(unsigned i, unsigned j) const { return rows[i].bit(ell - 1 - j); }

  std::uint64_t column(unsigned j) const {
    unsigned spw = slots_per_word();
    std::uint64_t w = packed_columns[j / spw];
    return (w >> ((j % spw) * col_stride)) & mu_mask();
  }

  bool layouts_consistent() const {
    for (unsigned j = 0; j < ell; ++j) {
      std::uint64_t col = 0;
      for (unsigned i = 0; i < mu; ++i)
        if (entry(i, j)) col |= std::uint64_t{1} << (mu - 1 - i);
      if (col != column(j)) return false;
    }
    return true;
  }
};

namespace detail {

template <std::size_t L>
void build_packed_columns(LinearHash<L>& h) {
  h.col_stride = h.mu == 0 ? 1 : unsigned(std::bit_ceil(h.mu));
  if (h.col_stride > 64) throw std::invalid_argument("hash range above 64 bits");
  unsigned spw = h.slots_per_word();
  unsigned padded = h.padded_columns();
  h.packed_columns.assign((padded + spw - 1) / spw, 0);
  for (unsigned j = 0; j < h.ell; ++j) {
    std::uint64_t col = 0;
    for (unsigned i = 0; i < h.mu; ++i)
      if (h.entry(i, j)) col |= std::uint64_t{1} << (h.mu - 1 - i);
    h.packed_columns[j / spw] |= col << ((j % spw) * h.col_stride);
  }
}

}  // namespace detail

/// Fixes a deterministic matrix; rows[i] must fit ell bits. mu = 0 yields
/// the constant-zero map (used for single-bucket splits); random sampling
/// rejects it.
template <std::size_t L>
LinearHash<L> hash_from_matrix(std::vector<BitWord<L>> rows, unsigned ell,
                               unsigned mu) {
  if (ell < 1 || ell > 64 * L) throw std::invalid_argument("bad input width");
  if (mu > ell || mu > 64) throw std::invalid_argument("bad output width");
  if (rows.size() != mu) throw std::invalid_argument("row count != mu");
  for (const auto& r : rows)
    if (!r.fits_width(ell)) throw std::invalid_argument("row exceeds ell bits");
  LinearHash<L> h;
  h.ell = ell;
  h.mu = mu;
  h.rows = std::move(rows);
  detail::build_packed_columns(h);
  return h;
}

template <std::size_t L>
LinearHash<L> sample_linear_hash(unsigned ell, unsigned mu, std::uint64_t seed) {
  if (mu == 0 || mu > ell) throw std::invalid_argument("need 1 <= mu <= ell");
  if (mu > 64) throw std::invalid_argument("hash range above 64 bits");
  if (ell > 64 * L) throw std::invalid_argument("ell exceeds key width");
  Rng rng(Rng::derive(seed, 0x4a));
  std::vector<BitWord<L>> rows;
  rows.reserve(mu);
  for (unsigned i = 0; i < mu; ++i) rows.push_back(random_word<L>(rng, ell));
  return hash_from_matrix(std::move(rows), ell, mu);
}

template <std::size_t L>
LinearHash<L> convolution_hash_from_bits(const std::vector<std::uint8_t>& a,
                                         unsigned ell, unsigned mu) {
  if (a.size() != ell + mu - 1)
    throw std::invalid_argument("convolution vector has wrong length");
  std::vector<BitWord<L>> rows(mu);
  for (unsigned i = 0; i < mu; ++i)
    for (unsigned j = 0; j < ell; ++j)
      if (a[i + j]) rows[i].set_bit(ell - 1 - j);
  return hash_from_matrix(std::move(rows), ell, mu);
}

/// Toeplitz subfamily: entry (i, j) = a[i + j] for one random bit vector a of
/// ell + mu - 1 bits. Also 1-universal, but needs far fewer random bits.
template <std::size_t L>
LinearHash<L> sample_convolution_hash(unsigned ell, unsigned mu,
                                      std::uint64_t seed) {
  if (mu == 0 || mu > ell) throw std::invalid_argument("need 1 <= mu <= ell");
  if (mu > 64) throw std::invalid_argument("hash range above 64 bits");
  if (ell > 64 * L) throw std::invalid_argument("ell exceeds key width");
  Rng rng(Rng::derive(seed, 0x4b));
  std::vector<std::uint8_t> a(ell + mu - 1);
  for (auto& bit : a) bit = std::uint8_t(rng.coin());
  return convolution_hash_from_bits<L>(a, ell, mu);
}

/// Row-wise evaluation: AND each row with the key, take the parity.
template <std::size_t L>
std::uint64_t eval_rowwise(const LinearHash<L>& h, const BitWord<L>& x) {
  std::uint64_t out = 0;
  for (unsigned i = 0; i < h.mu; ++i)
    if (parity_and(h.rows[i], x)) out |= std::uint64_t{1} << (h.mu - 1 - i);
  return out;
}

/// Column-wise evaluation: select the packed columns indicated by the 1-bits
/// of the key and XOR-fold them, halving the live slot count each round.
template <std::size_t L>
std::uint64_t eval_columnwise(const LinearHash<L>& h, const BitWord<L>& x) {
  if (!x.fits_width(h.ell)) throw std::invalid_argument("key width mismatch");
  if (h.mu == 0) return 0;
  unsigned spw = h.slots_per_word();
  std::vector<std::uint64_t> buf(h.packed_columns.size(), 0);
  for (unsigned j = 0; j < h.ell; ++j)
    if (x.bit(h.ell - 1 - j)) {
      std::uint64_t slot_ones = h.mu_mask() << ((j % spw) * h.col_stride);
      buf[j / spw] |= h.packed_columns[j / spw] & slot_ones;
    }
  std::size_t live = buf.size();
  while (live > 1) {
    live /= 2;
    for (std::size_t i = 0; i < live; ++i) buf[i] ^= buf[i + live];
  }
  for (unsigned step = std::min(h.padded_columns(), spw) / 2; step >= 1;
       step /= 2)
    buf[0] ^= buf[0] >> (step * h.col_stride);
  return buf[0] & h.mu_mask();
}

/// Batch evaluation: the selected columns of all keys are packed into one
/// contiguous buffer and folded together, so keys whose column blocks share
/// a 64-bit word are reduced by the same shift-and-XOR rounds.
template <std::size_t L>
std::vector<std::uint64_t> eval_batch(const LinearHash<L>& h,
                                      std::span<const BitWord<L>> xs) {
  std::vector<std::uint64_t> out(xs.size());
  if (xs.empty() || h.mu == 0) return out;
  unsigned spw = h.slots_per_word();
  unsigned padded = h.padded_columns();
  unsigned region_bits = padded * h.col_stride;
  std::size_t region_words = region_bits >= 64 ? region_bits / 64 : 1;
  std::size_t regions_per_word = region_bits >= 64 ? 1 : 64 / region_bits;
  std::size_t total_words =
      (xs.size() * region_words + regions_per_word - 1) / regions_per_word;
  std::vector<std::uint64_t> buf(total_words, 0);

  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!xs[i].fits_width(h.ell))
      throw std::invalid_argument("key width mismatch");
    std::size_t base = (i / regions_per_word) * region_words;
    unsigned offset = unsigned(i % regions_per_word) * region_bits;
    for (unsigned j = 0; j < h.ell; ++j)
      if (xs[i].bit(h.ell - 1 - j)) {
        std::uint64_t col = h.packed_columns[j / spw] &
                            (h.mu_mask() << ((j % spw) * h.col_stride));
        if (region_bits >= 64)
          buf[base + j / spw] |= col;
        else
          buf[base] |= col << offset;
      }
  }

  for (unsigned step = padded / 2; step >= 1; step /= 2) {
    unsigned step_bits = step * h.col_stride;
    if (step_bits >= 64) {
      std::size_t wd = step_bits / 64;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        std::size_t base = i * region_words;
        for (std::size_t q = 0; q < wd; ++q) buf[base + q] ^= buf[base + q + wd];
      }
    } else {
      for (auto& w : buf) w ^= w >> step_bits;
    }
  }

  for (std::size_t i = 0; i < xs.size(); ++i) {
    std::size_t base = (i / regions_per_word) * region_words;
    unsigned offset = unsigned(i % regions_per_word) * region_bits;
    out[i] = (buf[base] >> offset) & h.mu_mask();
  }
  return out;
}

}  // namespace xor3
