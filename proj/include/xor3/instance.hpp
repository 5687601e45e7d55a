#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "xor3/bitword.hpp"
#include "xor3/rng.hpp"

namespace xor3 {

/// Which ordered triples (a, b, c) with a ^ b = c count as solutions.
/// `any` admits every member triple, including a = b (then c = 0).
/// `distinct` additionally requires a, b, c pairwise distinct; with
/// a ^ b = c that is equivalent to none of them being the zero word, so the
/// distinct problem on X equals the unrestricted problem on X minus zero.
enum class TripleRule { any, distinct };

template <std::size_t L>
struct SolutionTriple {
  BitWord<L> a, b, c;
};

/// A set of n distinct keys of exactly `width` bits, stored in ascending
/// order. Immutable after construction.
template <std::size_t L>
class XorInstance {
 public:
  XorInstance(std::vector<BitWord<L>> words, unsigned width)
      : words_(std::move(words)), width_(width) {
    if (width_ < 1 || width_ > 64 * L || width_ > kMaxKeyBits)
      throw std::invalid_argument("key width out of range");
    if (words_.empty()) throw std::invalid_argument("instance must be nonempty");
    for (const auto& w : words_)
      if (!w.fits_width(width_))
        throw std::invalid_argument("key exceeds declared width");
    std::sort(words_.begin(), words_.end());
    for (std::size_t i = 1; i < words_.size(); ++i)
      if (words_[i] == words_[i - 1])
        throw std::invalid_argument("duplicate key in instance");
  }

  const std::vector<BitWord<L>>& words() const { return words_; }
  std::size_t size() const { return words_.size(); }
  unsigned width() const { return width_; }

  bool contains(const BitWord<L>& x) const {
    return std::binary_search(words_.begin(), words_.end(), x);
  }

 private:
  std::vector<BitWord<L>> words_;
  unsigned width_;
};

/// Moves to the set the solvers actually run on: under the distinct rule the
/// zero word is dropped (every triple of pairwise distinct members avoids it,
/// and every triple found without it is automatically pairwise distinct).
template <std::size_t L>
std::vector<BitWord<L>> effective_words(const XorInstance<L>& inst,
                                        TripleRule rule) {
  if (rule == TripleRule::any || !inst.contains(BitWord<L>::zero()))
    return inst.words();
  std::vector<BitWord<L>> out;
  out.reserve(inst.size() - 1);
  for (const auto& w : inst.words())
    if (!w.is_zero()) out.push_back(w);
  return out;
}

template <std::size_t L>
bool valid_triple(const XorInstance<L>& inst, const SolutionTriple<L>& t,
                  TripleRule rule = TripleRule::any) {
  if ((t.a ^ t.b) != t.c) return false;
  if (!inst.contains(t.a) || !inst.contains(t.b) || !inst.contains(t.c))
    return false;
  if (rule == TripleRule::distinct &&
      (t.a == t.b || t.a == t.c || t.b == t.c))
    return false;
  return true;
}

/// Reference semantics: scan all pairs and test membership of their XOR.
/// Independent of every solver; only sorted binary search is used.
template <std::size_t L>
std::optional<SolutionTriple<L>> brute_force_solve(
    const XorInstance<L>& inst, TripleRule rule = TripleRule::any) {
  std::vector<BitWord<L>> xs = effective_words(inst, rule);
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = i; j < xs.size(); ++j) {
      BitWord<L> c = xs[i] ^ xs[j];
      if (std::binary_search(xs.begin(), xs.end(), c))
        return SolutionTriple<L>{xs[i], xs[j], c};
    }
  return std::nullopt;
}

/// Exact number of ordered triples (a, b, c) in X^3 with a ^ b = c.
template <std::size_t L>
std::uint64_t count_all_solutions(const XorInstance<L>& inst,
                                  TripleRule rule = TripleRule::any) {
  std::vector<BitWord<L>> xs = effective_words(inst, rule);
  std::uint64_t count = 0;
  for (const auto& a : xs)
    for (const auto& b : xs)
      if (std::binary_search(xs.begin(), xs.end(), a ^ b)) ++count;
  return count;
}

enum class GenMode { random, planted, solution_free };

namespace detail {

template <std::size_t L>
std::vector<BitWord<L>> random_distinct_words(Rng& rng, std::size_t n,
                                              unsigned width) {
  if (width < 64 && n > (std::uint64_t{1} << width))
    throw std::invalid_argument("cannot draw " + std::to_string(n) +
                                " distinct words of width " +
                                std::to_string(width));
  std::vector<BitWord<L>> out;
  out.reserve(n);
  while (out.size() < n) {
    std::size_t missing = n - out.size();
    for (std::size_t i = 0; i < missing; ++i)
      out.push_back(random_word<L>(rng, width));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
  }
  return out;
}

}  // namespace detail

/// Deterministic instance generator. `random` draws n distinct uniform
/// words; `planted` injects one triple into a random instance;
/// `solution_free` rejection-samples random instances until none exists.
template <std::size_t L>
XorInstance<L> generate_instance(std::size_t n, unsigned width,
                                 std::uint64_t seed, GenMode mode,
                                 unsigned retry_budget = 1000) {
  if (n < 1) throw std::invalid_argument("instance size must be positive");
  switch (mode) {
    case GenMode::random: {
      Rng rng(Rng::derive(seed, 0x11));
      return XorInstance<L>(detail::random_distinct_words<L>(rng, n, width),
                            width);
    }
    case GenMode::planted: {
      if (n < 3 || width < 2)
        throw std::invalid_argument("planted instances need n >= 3, w >= 2");
      Rng rng(Rng::derive(seed, 0x22));
      auto words = detail::random_distinct_words<L>(rng, n, width);
      for (;;) {
        std::size_t i = rng.below(words.size());
        std::size_t j = rng.below(words.size());
        if (i == j) continue;
        BitWord<L> c = words[i] ^ words[j];
        if (std::binary_search(words.begin(), words.end(), c))
          return XorInstance<L>(std::move(words), width);
        if (c == words[i] || c == words[j]) continue;  // b or a was zero
        std::size_t victim = rng.below(words.size());
        if (victim == i || victim == j) continue;
        words[victim] = c;
        std::sort(words.begin(), words.end());
        return XorInstance<L>(std::move(words), width);
      }
    }
    case GenMode::solution_free: {
      for (unsigned attempt = 0; attempt < retry_budget; ++attempt) {
        Rng rng(Rng::derive(seed, 0x33 + attempt));
        XorInstance<L> inst(detail::random_distinct_words<L>(rng, n, width),
                            width);
        if (count_all_solutions(inst) == 0) return inst;
      }
      throw std::runtime_error(
          "no solution-free instance found within the retry budget; with n^3 "
          "on the order of 2^w solutions are too dense");
    }
  }
  throw std::invalid_argument("unknown generation mode");
}

}  // namespace xor3
