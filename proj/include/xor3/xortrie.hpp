#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "xor3/instance.hpp"

namespace xor3 {

/// Patricia-style binary tree over a sorted key set. Leaves list the keys in
/// ascending order; an inner node over a subset with longest common prefix
/// of length k carries the label (max of left half) ^ (min of right half),
/// which has the form 0^k 1 b. Labels strictly decrease along any inner
/// path from the root. The tree is immutable once built.
template <std::size_t L>
struct XorTrie {
  struct Node {
    BitWord<L> value;  // leaf key, or inner label
    std::int32_t left = -1;
    std::int32_t right = -1;
    bool leaf() const { return left < 0; }
  };

  std::vector<Node> nodes;
  std::int32_t root = -1;
  unsigned width = 0;
  std::size_t leaf_count = 0;
};

/// One-pass construction from the stream (inf, x1, l1, ..., l_{n-1}, xn, inf)
/// with l_i = x_i ^ x_{i+1}. The recursion of the streaming builder is run on
/// an explicit stack, so sorted chains of depth n are fine. Frame sentinels
/// use a distinguished infinity flag rather than a reserved bit pattern, so
/// the full key domain remains usable as labels.
template <std::size_t L>
XorTrie<L> make_tree(const XorInstance<L>& inst) {
  const auto& xs = inst.words();
  XorTrie<L> t;
  t.width = inst.width();
  t.leaf_count = xs.size();
  t.nodes.reserve(2 * xs.size() - 1);

  auto add_leaf = [&](const BitWord<L>& x) {
    t.nodes.push_back({x, -1, -1});
    return std::int32_t(t.nodes.size() - 1);
  };
  auto add_inner = [&](std::int32_t l, const BitWord<L>& label,
                       std::int32_t r) {
    t.nodes.push_back({label, l, r});
    return std::int32_t(t.nodes.size() - 1);
  };

  struct Frame {
    BitWord<L> sentinel;
    bool infinite;
    std::int32_t tree;
  };
  std::vector<Frame> stack;
  stack.push_back({BitWord<L>{}, true, add_leaf(xs[0])});

  for (std::size_t i = 1; i < xs.size(); ++i) {
    BitWord<L> label = xs[i - 1] ^ xs[i];
    // A label >= the frame sentinel terminates that frame's build call.
    while (!stack.back().infinite && !(label < stack.back().sentinel)) {
      Frame child = stack.back();
      stack.pop_back();
      stack.back().tree =
          add_inner(stack.back().tree, child.sentinel, child.tree);
    }
    stack.push_back({label, false, add_leaf(xs[i])});
  }
  while (stack.size() > 1) {
    Frame child = stack.back();
    stack.pop_back();
    stack.back().tree =
        add_inner(stack.back().tree, child.sentinel, child.tree);
  }
  t.root = stack.back().tree;
  return t;
}

/// Lazy in-order traversal of {a ^ x : x in X} in strictly ascending order.
/// Every tree node is visited exactly once (2n - 1 visits); the visit
/// counter is exposed for instrumentation. At an inner node with label l the
/// branch carrying the smaller shifted keys comes first: the left subtree
/// iff a ^ l > a.
template <std::size_t L>
class TrieTraversal {
 public:
  TrieTraversal(const XorTrie<L>& tree, BitWord<L> a)
      : tree_(&tree), a_(a) {
    if (!a.fits_width(tree.width))
      throw std::invalid_argument("traversal key exceeds tree width");
    if (tree.root >= 0) stack_.push_back(tree.root);
  }

  std::optional<BitWord<L>> next() {
    while (!stack_.empty()) {
      const auto& node = tree_->nodes[std::size_t(stack_.back())];
      stack_.pop_back();
      ++visits_;
      if (node.leaf()) return a_ ^ node.value;
      ++branch_compares_;
      if ((a_ ^ node.value) > a_) {
        stack_.push_back(node.right);
        stack_.push_back(node.left);
      } else {
        stack_.push_back(node.left);
        stack_.push_back(node.right);
      }
    }
    return std::nullopt;
  }

  std::uint64_t visits() const { return visits_; }
  std::uint64_t branch_compares() const { return branch_compares_; }

 private:
  const XorTrie<L>* tree_;
  BitWord<L> a_;
  std::vector<std::int32_t> stack_;
  std::uint64_t visits_ = 0;
  std::uint64_t branch_compares_ = 0;
};

/// Eager variant for tests.
template <std::size_t L>
std::vector<BitWord<L>> materialize_traversal(const XorTrie<L>& tree,
                                              const BitWord<L>& a) {
  TrieTraversal<L> it(tree, a);
  std::vector<BitWord<L>> out;
  while (auto y = it.next()) out.push_back(*y);
  return out;
}

struct QuadraticStats {
  std::uint64_t key_comparisons = 0;  // three-way merge steps + branch tests
  std::uint64_t node_visits = 0;
};

/// Deterministic quadratic solver: for each a in ascending order, run the
/// sorted stream a ^ X against the sorted keys in one interleaved scan. The
/// lowest a with a witness is reported.
template <std::size_t L>
std::optional<SolutionTriple<L>> solve_quadratic(
    const XorInstance<L>& inst, TripleRule rule = TripleRule::any,
    QuadraticStats* stats = nullptr) {
  std::vector<BitWord<L>> xs = effective_words(inst, rule);
  QuadraticStats local;
  std::optional<SolutionTriple<L>> found;
  if (!xs.empty()) {
    XorInstance<L> shadow(xs, inst.width());
    XorTrie<L> tree = make_tree(shadow);
    for (const auto& a : xs) {
      TrieTraversal<L> it(tree, a);
      std::optional<BitWord<L>> y = it.next();
      std::size_t j = 0;
      while (y && j < xs.size()) {
        ++local.key_comparisons;
        if (*y < xs[j]) {
          y = it.next();
        } else if (*y > xs[j]) {
          ++j;
        } else {
          found = SolutionTriple<L>{a, *y ^ a, xs[j]};
          break;
        }
      }
      local.node_visits += it.visits();
      local.key_comparisons += it.branch_compares();
      if (found) break;
    }
  }
  if (stats) *stats = local;
  return found;
}

template <std::size_t L>
void dump_tree(std::ostream& out, const XorTrie<L>& tree) {
  struct Item {
    std::int32_t node;
    unsigned depth;
  };
  std::vector<Item> stack;
  if (tree.root >= 0) stack.push_back({tree.root, 0});
  while (!stack.empty()) {
    Item it = stack.back();
    stack.pop_back();
    const auto& node = tree.nodes[std::size_t(it.node)];
    for (unsigned d = 0; d < it.depth; ++d) out << "  ";
    if (node.leaf())
      out << "leaf " << to_hex(node.value, tree.width) << '\n';
    else
      out << "inner " << to_hex(node.value, tree.width) << '\n';
    if (!node.leaf()) {
      stack.push_back({node.right, it.depth + 1});
      stack.push_back({node.left, it.depth + 1});
    }
  }
}

template <std::size_t L>
std::string dump_tree_string(const XorTrie<L>& tree) {
  std::ostringstream os;
  dump_tree(os, tree);
  return os.str();
}

}  // namespace xor3
