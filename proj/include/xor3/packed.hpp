#pragma once

#include <atomic>
#include <bit>
#include <cstdint>
#include <map>
#include <mutex>
#include <span>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

#include "xor3/simword.hpp"

namespace xor3 {

/// Test hook: when set, the final pass of every bitonic sort is skipped.
/// Used by the verification sweep to prove it detects a broken network.
inline std::atomic<bool> g_fault_bitonic_skip_pass{false};

/// Geometry of a packed array. k fields of `field_bits` bits live in
/// ceil(k / fields_per_word) simulated words of width sim_width; fields never
/// straddle word boundaries and both k and fields_per_word are powers of two,
/// so a compare-exchange at distance d is either a pure in-word shift
/// (d < fields_per_word) or a pairing of whole words.
///
/// Field layout, low bit first:
///   bit 0                 marker (0 for plain arrays; set on the second
///                         operand inside intersection listing)
///   bits 1..payload_bits  the stored value
///   bit field_bits-1      test bit, zero between operations
/// The field is widened beyond payload_bits + 2 when the index tags of a
/// doubled (concatenated) array need more room. Tags travel in a parallel
/// word sequence with identical geometry: tag field i belongs to data
/// field i and holds its original position.
struct PackedLayout {
  unsigned sim_width = 0;
  unsigned payload_bits = 0;
  unsigned field_bits = 0;
  unsigned k = 0;
  unsigned fields_per_word = 0;

  static constexpr unsigned kMaxWords = 64;

  std::size_t word_count() const { return k / fields_per_word; }

  friend bool operator<(const PackedLayout& a, const PackedLayout& b) {
    return std::tie(a.sim_width, a.payload_bits, a.field_bits, a.k,
                    a.fields_per_word) <
           std::tie(b.sim_width, b.payload_bits, b.field_bits, b.k,
                    b.fields_per_word);
  }
  friend bool operator==(const PackedLayout& a, const PackedLayout& b) {
    return std::tie(a.sim_width, a.payload_bits, a.field_bits, a.k,
                    a.fields_per_word) ==
           std::tie(b.sim_width, b.payload_bits, b.field_bits, b.k,
                    b.fields_per_word);
  }
};

inline PackedLayout make_layout(std::size_t count, unsigned payload_bits,
                                unsigned sim_width, std::size_t min_fields = 1) {
  if (payload_bits < 1) throw std::invalid_argument("payload width must be >= 1");
  PackedLayout lay;
  lay.sim_width = sim_width;
  lay.payload_bits = payload_bits;
  std::size_t k = std::bit_ceil(std::max<std::size_t>({count, min_fields, 1}));
  if (k > (std::size_t{1} << 20)) throw std::invalid_argument("field count too large");
  lay.k = unsigned(k);
  // Room for the test bit and for position tags of the doubled array.
  lay.field_bits = std::max(payload_bits + 2u,
                            unsigned(std::bit_width(2 * k - 1)));
  unsigned per_word = sim_width / lay.field_bits;
  if (per_word == 0)
    throw std::invalid_argument("field does not fit the simulated word");
  lay.fields_per_word = unsigned(std::min<std::size_t>(
      std::bit_floor(std::size_t(per_word)), k));
  if (lay.word_count() > PackedLayout::kMaxWords)
    throw std::invalid_argument("packed capacity exceeded");
  return lay;
}

namespace detail {

/// Per-layout mask constants for the sorting network. Built once with
/// uncounted limb writes (the word RAM precomputes them) and cached.
struct PackedConstants {
  // Indexed by log2(d) for d < fields_per_word.
  std::vector<SimWord> pair_fields;  // full fields i with (i & d) == 0
  std::vector<SimWord> pair_tests;   // test bits of those fields
  // Indexed by log2(g) for g <= fields_per_word.
  std::vector<SimWord> descend_fields;  // full fields i with (i & g) != 0
  SimWord all_tests;        // test bit of every field
  SimWord all_fields;       // all f bits of every field
  SimWord none_fields;      // zero word
  SimWord field0;           // bits of field 0
  SimWord top_field;        // bits of field fields_per_word-1 (or k-1 in word)
  SimWord marker_ones;      // marker bit of every field
  SimWord field_lsb_ones;   // bit 0 of every field (for broadcast replication)
  std::vector<SimWord> position_tags;  // tag words holding field indices
};

inline SimWord build_field_mask(const PackedLayout& lay, unsigned lo_bit,
                                unsigned hi_bit,
                                bool (*keep)(unsigned, unsigned), unsigned arg) {
  SimWord w(lay.sim_width);
  for (unsigned i = 0; i < lay.fields_per_word; ++i) {
    if (!keep(i, arg)) continue;
    for (unsigned b = lo_bit; b <= hi_bit; ++b) {
      unsigned pos = i * lay.field_bits + b;
      w.set_limb(pos / 64, w.limb(pos / 64) | (std::uint64_t{1} << (pos % 64)));
    }
  }
  return w;
}

inline const PackedConstants& packed_constants(const PackedLayout& lay) {
  static std::mutex mu;
  static std::map<PackedLayout, PackedConstants> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(lay);
  if (it != cache.end()) return it->second;

  PackedConstants c;
  auto keep_pair = [](unsigned i, unsigned d) { return (i & d) == 0; };
  auto keep_desc = [](unsigned i, unsigned g) { return (i & g) != 0; };
  auto keep_all = [](unsigned, unsigned) { return true; };
  auto keep_one = [](unsigned i, unsigned which) { return i == which; };
  unsigned f = lay.field_bits;
  for (unsigned d = 1; d < lay.fields_per_word; d *= 2) {
    c.pair_fields.push_back(build_field_mask(lay, 0, f - 1, keep_pair, d));
    c.pair_tests.push_back(build_field_mask(lay, f - 1, f - 1, keep_pair, d));
  }
  for (unsigned g = 1; g <= lay.fields_per_word; g *= 2)
    c.descend_fields.push_back(build_field_mask(lay, 0, f - 1, keep_desc, g));
  c.all_tests = build_field_mask(lay, f - 1, f - 1, keep_all, 0);
  c.all_fields = build_field_mask(lay, 0, f - 1, keep_all, 0);
  c.none_fields = SimWord(lay.sim_width);
  c.field0 = build_field_mask(lay, 0, f - 1, keep_one, 0);
  c.top_field =
      build_field_mask(lay, 0, f - 1, keep_one, lay.fields_per_word - 1);
  c.marker_ones = build_field_mask(lay, 0, 0, keep_all, 0);
  c.field_lsb_ones = c.marker_ones;
  for (std::size_t w = 0; w < lay.word_count(); ++w) {
    SimWord tags(lay.sim_width);
    for (unsigned i = 0; i < lay.fields_per_word; ++i) {
      std::uint64_t idx = w * lay.fields_per_word + i;
      unsigned pos = i * f;
      tags.set_limb(pos / 64, tags.limb(pos / 64) | (idx << (pos % 64)));
      if (pos % 64 && pos % 64 + std::bit_width(idx) > 64)
        tags.set_limb(pos / 64 + 1,
                      tags.limb(pos / 64 + 1) | (idx >> (64 - pos % 64)));
    }
    c.position_tags.push_back(tags);
  }
  return cache.emplace(lay, std::move(c)).first->second;
}

}  // namespace detail

/// A word-packed array: k fields of payload_bits-bit values plus test and
/// marker bits, with index tags in a parallel word sequence of the same
/// geometry. Values are immutable; operations return new arrays.
struct PackedArray {
  PackedLayout layout;
  std::size_t real_size = 0;
  std::vector<SimWord> data;
  std::vector<SimWord> tag;

  std::uint64_t payload_mask() const {
    return (std::uint64_t{1} << layout.payload_bits) - 1;
  }

  /// Raw field bits (uncounted; test/debug accessor).
  std::uint64_t field_raw(std::size_t i) const {
    unsigned f = layout.field_bits;
    unsigned pos = unsigned(i % layout.fields_per_word) * f;
    std::uint64_t v = 0;
    const SimWord& w = data[i / layout.fields_per_word];
    for (unsigned b = 0; b < f; ++b) {
      unsigned p = pos + b;
      v |= ((w.limb(p / 64) >> (p % 64)) & 1u) << b;
    }
    return v;
  }
  std::uint64_t field_payload(std::size_t i) const {
    return (field_raw(i) >> 1) & payload_mask();
  }
  std::uint64_t tag_raw(std::size_t i) const {
    unsigned f = layout.field_bits;
    unsigned pos = unsigned(i % layout.fields_per_word) * f;
    std::uint64_t v = 0;
    const SimWord& w = tag[i / layout.fields_per_word];
    for (unsigned b = 0; b < f; ++b) {
      unsigned p = pos + b;
      v |= ((w.limb(p / 64) >> (p % 64)) & 1u) << b;
    }
    return v;
  }
};

/// Packs values (each below 2^payload_bits) into a new array, padding the
/// field count to a power of two with copies of the last value. Padding
/// fields keep their slot index as tag, so they are recognizable afterwards:
/// a tag at or above real_size marks padding.
inline PackedArray pack(std::span<const std::uint64_t> values,
                        unsigned payload_bits, unsigned sim_width,
                        std::size_t min_fields = 1) {
  PackedArray pa;
  pa.layout = make_layout(values.size(), payload_bits, sim_width, min_fields);
  pa.real_size = values.size();
  const PackedLayout& lay = pa.layout;
  pa.data.assign(lay.word_count(), SimWord(lay.sim_width));
  pa.tag = detail::packed_constants(lay).position_tags;
  std::uint64_t last = 0;
  for (std::size_t i = 0; i < lay.k; ++i) {
    std::uint64_t v = i < values.size() ? values[i] : last;
    if (v > pa.payload_mask())
      throw std::invalid_argument("packed value exceeds payload width");
    last = v;
    unsigned pos = unsigned(i % lay.fields_per_word) * lay.field_bits + 1;
    SimWord& w = pa.data[i / lay.fields_per_word];
    w.set_limb(pos / 64, w.limb(pos / 64) | (v << (pos % 64)));
    if (pos % 64 && pos % 64 + lay.payload_bits > 64)
      w.set_limb(pos / 64 + 1,
                 w.limb(pos / 64 + 1) | (v >> (64 - pos % 64)));
  }
  return pa;
}

/// Stored values in field order, padding dropped.
inline std::vector<std::uint64_t> unpack(const PackedArray& pa) {
  std::vector<std::uint64_t> out;
  out.reserve(pa.real_size);
  for (std::size_t i = 0; i < pa.real_size; ++i)
    out.push_back(pa.field_payload(i));
  return out;
}

/// XORs every payload with v using a constant number of word operations:
/// one multiplication replicates v into all fields, then each word is XORed.
inline PackedArray xor_broadcast(const PackedArray& pa, std::uint64_t v) {
  if (v > pa.payload_mask())
    throw std::invalid_argument("broadcast value exceeds payload width");
  const auto& c = detail::packed_constants(pa.layout);
  PackedArray out = pa;
  SimWord rep = mul_low(SimWord::from_u64(pa.layout.sim_width, v << 1),
                        c.field_lsb_ones);
  for (auto& w : out.data) w = w ^ rep;
  return out;
}

namespace detail {

/// One parallel compare-exchange within each word: fields i with (i & d) == 0
/// against their partners i + d. `descend` marks fields whose pair sorts in
/// falling order.
inline void compexch_in_word(SimWord& x, SimWord& t, const SimWord& pair_mask,
                             const SimWord& pair_test, const SimWord& descend,
                             unsigned shift, unsigned field_bits) {
  SimWord lo = x & pair_mask;
  SimWord hi = (x >> shift) & pair_mask;
  SimWord ge = ((lo | pair_test) - hi) & pair_test;
  SimWord m = ((ge - (ge >> (field_bits - 1))) | ge) ^ descend;
  SimWord nm = ~m;
  x = ((hi & m) | (lo & nm)) | (((lo & m) | (hi & nm)) << shift);
  SimWord tlo = t & pair_mask;
  SimWord thi = (t >> shift) & pair_mask;
  t = ((thi & m) | (tlo & nm)) | (((tlo & m) | (thi & nm)) << shift);
}

/// Compare-exchange of two whole words, field-parallel, uniform direction.
inline void compexch_words(SimWord& xlo, SimWord& xhi, SimWord& tlo,
                           SimWord& thi, const SimWord& all_tests,
                           const SimWord& all_fields, bool descend,
                           unsigned field_bits) {
  SimWord ge = ((xlo | all_tests) - xhi) & all_tests;
  SimWord m = (ge - (ge >> (field_bits - 1))) | ge;
  if (descend) m = m ^ all_fields;
  SimWord nm = ~m;
  SimWord nlo = (xhi & m) | (xlo & nm);
  SimWord nhi = (xlo & m) | (xhi & nm);
  xlo = nlo;
  xhi = nhi;
  SimWord ntlo = (thi & m) | (tlo & nm);
  SimWord nthi = (tlo & m) | (thi & nm);
  tlo = ntlo;
  thi = nthi;
}

inline void bitonic_sort_in_place(PackedArray& pa) {
  const PackedLayout& lay = pa.layout;
  const PackedConstants& c = packed_constants(lay);
  unsigned fpw = lay.fields_per_word;
  bool drop_last_pass = g_fault_bitonic_skip_pass.load(std::memory_order_relaxed);
  for (unsigned g = 2; g <= lay.k; g *= 2) {
    for (unsigned d = g / 2; d >= 1; d /= 2) {
      if (drop_last_pass && g == lay.k && d == 1 && lay.k > 1) continue;
      if (d < fpw) {
        unsigned di = unsigned(std::bit_width(d) - 1);
        unsigned shift = d * lay.field_bits;
        for (std::size_t w = 0; w < pa.data.size(); ++w) {
          const SimWord* descend;
          if (g <= fpw) {
            descend = &c.descend_fields[std::bit_width(g) - 1];
          } else {
            bool desc = ((w * fpw) & g) != 0;
            descend = desc ? &c.all_fields : &c.descend_fields[0];
            // descend_fields[0] is the empty mask (no field has i & 1 != 0
            // on bit... g=1 never used); use a zero word instead:
          }
          compexch_in_word(pa.data[w], pa.tag[w], c.pair_fields[di],
                           c.pair_tests[di], *descend, shift, lay.field_bits);
        }
      } else {
        std::size_t wd = d / fpw;
        for (std::size_t w = 0; w < pa.data.size(); ++w) {
          if (w & wd) continue;
          bool desc = (w & (g / fpw)) != 0;
          compexch_words(pa.data[w], pa.data[w + wd], pa.tag[w], pa.tag[w + wd],
                         c.all_tests, c.all_fields, desc, lay.field_bits);
        }
      }
    }
  }
}

}  // namespace detail

/// Batcher's bitonic network over the packed fields, ascending by field
/// value (payload with the marker bit as least significant tiebreak). Tags
/// move with their fields. Cost is Theta(log^2 k) word steps.
inline PackedArray bitonic_sort(const PackedArray& pa) {
  PackedArray out = pa;
  detail::bitonic_sort_in_place(out);
  return out;
}

struct IntersectStats {
  std::uint64_t core_ops = 0;  // concatenate + sorts + boundary search
  std::uint64_t emit_ops = 0;  // run walking, proportional to output size
};

/// All index pairs (i, j) with payload a_i == payload b_j. Both arrays must
/// share one layout and hold distinct payloads apart from padding; pairs
/// involving padding fields are dropped. Pipeline: concatenate with marker
/// bits, bitonic sort, XOR each field with its right neighbour, sort the
/// difference word, then walk the runs around every field equal to
/// 0...01 (same payload, opposite markers).
inline std::vector<std::pair<std::uint32_t, std::uint32_t>> intersect_listing(
    const PackedArray& a, const PackedArray& b, IntersectStats* stats = nullptr) {
  if (!(a.layout == b.layout))
    throw std::invalid_argument("intersect operands must share a layout");
  const PackedLayout& in_lay = a.layout;
  SimOpScope scope;

  PackedLayout lay = in_lay;
  lay.k = 2 * in_lay.k;
  lay.fields_per_word = unsigned(std::min<std::size_t>(
      std::bit_floor(std::size_t(lay.sim_width / lay.field_bits)),
      lay.k));
  if (lay.word_count() > PackedLayout::kMaxWords)
    throw std::invalid_argument("packed capacity exceeded");
  const auto& cin = detail::packed_constants(in_lay);
  const auto& c2 = detail::packed_constants(lay);
  unsigned f = lay.field_bits;

  PackedArray concat;
  concat.layout = lay;
  concat.real_size = lay.k;
  if (lay.fields_per_word == 2 * in_lay.k && in_lay.word_count() == 1) {
    unsigned shift = in_lay.k * f;
    concat.data.push_back(a.data[0] | ((b.data[0] | cin.marker_ones) << shift));
    concat.tag.push_back(a.tag[0] | (b.tag[0] << shift));
  } else {
    concat.data = a.data;
    concat.tag = a.tag;
    for (std::size_t w = 0; w < b.data.size(); ++w) {
      concat.data.push_back(b.data[w] | cin.marker_ones);
      concat.tag.push_back(b.tag[w]);
    }
  }
  detail::bitonic_sort_in_place(concat);

  // Difference word: field i of the sorted sequence XOR field i + 1.
  PackedArray diff;
  diff.layout = lay;
  diff.real_size = lay.k;
  unsigned fpw = lay.fields_per_word;
  std::size_t words = lay.word_count();
  for (std::size_t w = 0; w < words; ++w) {
    SimWord shifted = concat.data[w] >> f;
    if (w + 1 < words)
      shifted = shifted | ((concat.data[w + 1] & c2.field0) << ((fpw - 1) * f));
    diff.data.push_back(shifted ^ concat.data[w]);
  }
  diff.data.back() = diff.data.back() & ~c2.top_field;
  diff.tag = c2.position_tags;
  detail::bitonic_sort_in_place(diff);

  // Counted single-field reads.
  auto read_field = [f](const std::vector<SimWord>& ws, const PackedLayout& l,
                        std::size_t i) {
    SimWord v = ws[i / l.fields_per_word] >>
                (unsigned(i % l.fields_per_word) * f);
    return (v & detail::packed_constants(l).field0).low();
  };

  // Binary search for the run of difference fields equal to exactly 1.
  auto lower_bound_value = [&](std::uint64_t bound) {
    std::size_t lo = 0, hi = lay.k;
    while (lo < hi) {
      std::size_t mid = (lo + hi) / 2;
      if (read_field(diff.data, lay, mid) < bound)
        lo = mid + 1;
      else
        hi = mid;
    }
    return lo;
  };
  std::size_t run_begin = lower_bound_value(1);
  std::size_t run_end = lower_bound_value(2);

  if (stats) stats->core_ops = scope.consumed();
  SimOpScope emit_scope;

  std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
  for (std::size_t q = run_begin; q < run_end; ++q) {
    std::size_t pos = read_field(diff.tag, lay, q);
    std::uint64_t value = read_field(concat.data, lay, pos) >> 1;
    std::vector<std::uint32_t> left, right;
    for (std::size_t i = pos + 1; i-- > 0;) {
      std::uint64_t raw = read_field(concat.data, lay, i);
      if ((raw & 1) != 0 || (raw >> 1) != value) break;
      std::uint64_t idx = read_field(concat.tag, lay, i);
      if (idx < a.real_size) left.push_back(std::uint32_t(idx));
    }
    for (std::size_t i = pos + 1; i < lay.k; ++i) {
      std::uint64_t raw = read_field(concat.data, lay, i);
      if ((raw & 1) == 0 || (raw >> 1) != value) break;
      std::uint64_t idx = read_field(concat.tag, lay, i);
      if (idx < b.real_size) right.push_back(std::uint32_t(idx));
    }
    for (auto ia : left)
      for (auto ib : right) out.emplace_back(ia, ib);
  }
  if (stats) stats->emit_ops = emit_scope.consumed();
  return out;
}

}  // namespace xor3
