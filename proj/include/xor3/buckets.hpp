#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "xor3/instance.hpp"
#include "xor3/linear_hash.hpp"

namespace xor3 {

/// Partition of an instance into R = 2^r buckets by a linear hash. A bucket
/// is bad when its size exceeds 3n/R; bad elements are the members of bad
/// buckets. Bucket lists inherit the instance order, so they stay sorted.
template <std::size_t L>
struct BucketTable {
  unsigned r = 0;
  LinearHash<L> h1;
  std::vector<std::vector<BitWord<L>>> buckets;
  std::vector<std::uint8_t> bad;  // per bucket
  std::vector<BitWord<L>> bad_elements;
  std::size_t n = 0;
  unsigned retries = 0;

  std::size_t bucket_count() const { return buckets.size(); }
  bool is_bad(std::size_t u) const { return bad[u] != 0; }

  /// size > 3n/R, compared exactly in integers.
  bool overfull(std::size_t size) const {
    return size * bucket_count() > 3 * n;
  }
};

template <std::size_t L>
BucketTable<L> split_buckets_with(const std::vector<BitWord<L>>& words,
                                  LinearHash<L> h1) {
  BucketTable<L> bt;
  bt.r = h1.mu;
  bt.h1 = std::move(h1);
  bt.n = words.size();
  bt.buckets.assign(std::size_t{1} << bt.r, {});
  auto hv = eval_batch(bt.h1, std::span<const BitWord<L>>(words));
  for (std::size_t i = 0; i < words.size(); ++i)
    bt.buckets[hv[i]].push_back(words[i]);
  bt.bad.assign(bt.buckets.size(), 0);
  for (std::size_t u = 0; u < bt.buckets.size(); ++u)
    if (bt.overfull(bt.buckets[u].size())) {
      bt.bad[u] = 1;
      bt.bad_elements.insert(bt.bad_elements.end(), bt.buckets[u].begin(),
                             bt.buckets[u].end());
    }
  return bt;
}

template <std::size_t L>
BucketTable<L> split_buckets(const XorInstance<L>& inst, unsigned r,
                             std::uint64_t seed) {
  if (r > inst.width()) throw std::invalid_argument("need r <= key width");
  LinearHash<L> h1 =
      r == 0 ? hash_from_matrix<L>({}, inst.width(), 0)
             : sample_linear_hash<L>(inst.width(), r, seed);
  return split_buckets_with(inst.words(), std::move(h1));
}

/// Resamples h1 until fewer than 2R elements sit in overfull buckets. The
/// expected number of bad elements is below R, so each attempt succeeds with
/// probability above one half.
template <std::size_t L>
BucketTable<L> resample_until_few_bad(const std::vector<BitWord<L>>& words,
                                      unsigned width, unsigned r,
                                      std::uint64_t seed,
                                      unsigned retry_budget = 64) {
  if (r > width) throw std::invalid_argument("need r <= key width");
  for (unsigned attempt = 0; attempt < retry_budget; ++attempt) {
    LinearHash<L> h1 =
        r == 0 ? hash_from_matrix<L>({}, width, 0)
               : sample_linear_hash<L>(width, r, Rng::derive(seed, attempt));
    BucketTable<L> bt = split_buckets_with(words, std::move(h1));
    if (bt.bad_elements.size() < 2 * bt.bucket_count()) {
      bt.retries = attempt;
      return bt;
    }
  }
  throw std::runtime_error("bucket split kept too many overfull buckets "
                           "within the retry budget");
}

template <std::size_t L>
BucketTable<L> resample_until_few_bad(const XorInstance<L>& inst, unsigned r,
                                      std::uint64_t seed,
                                      unsigned retry_budget = 64) {
  return resample_until_few_bad(inst.words(), inst.width(), r, seed,
                                retry_budget);
}

/// Empirical mean, over `trials` fresh hash functions, of the number of
/// elements landing in buckets of size >= threshold. X is fixed once per
/// call; only the hash varies. The default threshold is 3n/m, compared
/// exactly; pass `threshold` to override with an integer bucket size.
template <std::size_t L>
double overfull_statistic(std::size_t n, unsigned width, std::size_t m,
                          unsigned trials, std::uint64_t seed,
                          std::size_t threshold = 0) {
  if (m == 0 || (m & (m - 1)) != 0)
    throw std::invalid_argument("bucket count must be a power of two");
  if (width < 64 && m > (std::uint64_t{1} << width))
    throw std::invalid_argument("bucket count exceeds universe");
  if (trials < 1) throw std::invalid_argument("need at least one trial");
  unsigned r = unsigned(std::bit_width(m) - 1);
  Rng xrng(Rng::derive(seed, 0x57));
  auto words = detail::random_distinct_words<L>(xrng, n, width);
  std::vector<std::size_t> sizes(m);
  std::uint64_t total = 0;
  for (unsigned t = 0; t < trials; ++t) {
    LinearHash<L> h =
        r == 0 ? hash_from_matrix<L>({}, width, 0)
               : sample_linear_hash<L>(width, r, Rng::derive(seed, 1000 + t));
    std::fill(sizes.begin(), sizes.end(), 0);
    auto hv = eval_batch(h, std::span<const BitWord<L>>(words));
    for (auto v : hv) ++sizes[v];
    for (auto v : hv) {
      std::size_t s = sizes[v];
      bool over = threshold > 0 ? s >= threshold : s * m >= 3 * n;
      if (over) ++total;
    }
  }
  return double(total) / double(trials);
}

}  // namespace xor3
