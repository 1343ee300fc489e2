#pragma once

// The oscillation set of a triple of increasing sequences, the coloring read
// off it, and the inverter that, given any target word and any superperfect
// tree, builds three branches of the tree whose coloring is that word.
//
// O(x,y,z) = { n >= 1 : z(n-1) <= x(n-1), y(n-1) and x(n), y(n) < z(n) }
// With n_0 < n_1 < ... enumerating O, bit k is 0 iff x(n_k) <= y(n_k).

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "oscforce/alphabet.hpp"
#include "oscforce/error.hpp"
#include "oscforce/seqspace.hpp"
#include "oscforce/sptrees.hpp"

namespace oscforce {

/// Every n with 1 <= n <= upto in the oscillation set, increasing.
template <class V>
std::vector<Nat> osc_set(std::span<const V> x, std::span<const V> y, std::span<const V> z, std::size_t upto) {
  const std::size_t window = std::min({x.size(), y.size(), z.size()});
  if (upto >= window) {
    fail(ErrorCode::precondition, "osc_set: index " + std::to_string(upto) + " out of range for prefixes of length " +
                                      std::to_string(window));
  }
  std::vector<Nat> out;
  for (std::size_t n = 1; n <= upto; ++n) {
    const bool below = z[n - 1] <= x[n - 1] && z[n - 1] <= y[n - 1];
    const bool above = x[n] < z[n] && y[n] < z[n];
    if (below && above) out.push_back(n);
  }
  return out;
}

template <class V>
std::vector<Nat> osc_set(const std::vector<V>& x, const std::vector<V>& y, const std::vector<V>& z,
                         std::size_t upto) {
  return osc_set<V>(std::span<const V>(x), std::span<const V>(y), std::span<const V>(z), upto);
}

struct ColorResult {
  BitWord bits;
  /// False when the observed prefix holds fewer than the requested number of
  /// oscillation points. The coloring is only defined on triples with
  /// infinitely many, which no finite prefix can certify.
  bool complete = true;
  /// Oscillation points found over the whole common prefix.
  std::vector<Nat> indices;
};

/// First k bits of the coloring, reading the full common prefix.
template <class V>
ColorResult color(std::span<const V> x, std::span<const V> y, std::span<const V> z, std::size_t k) {
  const std::size_t window = std::min({x.size(), y.size(), z.size()});
  ColorResult out;
  if (window >= 1) out.indices = osc_set(x, y, z, window - 1);
  const std::size_t take = std::min(k, out.indices.size());
  for (std::size_t j = 0; j < take; ++j) {
    const auto n = out.indices[j];
    out.bits.push_back(!(x[n] <= y[n]));
  }
  out.complete = out.indices.size() >= k;
  return out;
}

template <class V>
ColorResult color(const std::vector<V>& x, const std::vector<V>& y, const std::vector<V>& z, std::size_t k) {
  return color<V>(std::span<const V>(x), std::span<const V>(y), std::span<const V>(z), k);
}

// ---------------------------------------------------------------------------
// Inverter

template <OrderedAlphabet A>
struct OscStage {
  TreeNode<A> x;
  TreeNode<A> y;
  TreeNode<A> z;
  std::size_t l = 0;  // length of x
  std::size_t m = 0;  // length of y
  std::size_t n = 0;  // length of z; the oscillation point of this stage
  bool bit = false;
};

template <OrderedAlphabet A>
struct OscTrace {
  std::vector<Nat> indices;
  BitWord bits;
  std::vector<OscStage<A>> stages;
};

template <OrderedAlphabet A>
struct Inversion {
  TreeNode<A> x;
  TreeNode<A> y;
  TreeNode<A> z;
  OscTrace<A> trace;
};

namespace detail {

/// Least splitting node of length >= min_len above `base`: take the promised
/// splitting node, and while it is too short step to its least child and
/// split again.
template <OrderedAlphabet A>
TreeNode<A> splitting_extension(const TreeOracle<A>& tree, TreeNode<A> base, std::size_t min_len,
                                std::size_t budget) {
  auto t = split_node(tree, std::span<const typename A::value_type>(base), budget);
  while (t.size() < min_len) {
    t.push_back(child_above(tree, std::span<const typename A::value_type>(t), std::nullopt, budget));
    t = split_node(tree, std::span<const typename A::value_type>(t), budget);
  }
  return t;
}

template <class V>
std::span<const V> as_span(const std::vector<V>& v) {
  return std::span<const V>(v);
}

}  // namespace detail

/// Problems found when checking an inversion against its target; empty when
/// every prefix of x, y, z is in the tree, the coloring reproduces the target
/// with the complete flag, the oscillation points are exactly the trace's
/// stage lengths, and stage lengths obey n_k < first-built <= second-built <
/// n_{k+1}.
template <OrderedAlphabet A>
std::vector<std::string> verify_inversion(const TreeOracle<A>& tree, const Inversion<A>& inv, const BitWord& target) {
  std::vector<std::string> problems;
  auto check_branch = [&](const TreeNode<A>& branch, const char* name) {
    for (std::size_t len = 0; len <= branch.size(); ++len) {
      if (!tree.contains(std::span(branch.data(), len))) {
        problems.push_back(std::string(name) + " prefix of length " + std::to_string(len) + " is not in the tree");
        return;
      }
    }
  };
  check_branch(inv.x, "x");
  check_branch(inv.y, "y");
  check_branch(inv.z, "z");

  const auto c = color(inv.x, inv.y, inv.z, target.size());
  if (!c.complete) problems.push_back("coloring is incomplete on the returned prefixes");
  if (c.bits != target) problems.push_back("coloring " + c.bits.str() + " differs from target " + target.str());
  if (c.indices != inv.trace.indices) problems.push_back("oscillation points differ from the trace's stage indices");
  if (inv.trace.bits != target) problems.push_back("trace bits differ from target");

  const auto& stages = inv.trace.stages;
  for (std::size_t k = 0; k < stages.size(); ++k) {
    const auto& s = stages[k];
    const std::size_t first = s.bit ? s.m : s.l;
    const std::size_t second = s.bit ? s.l : s.m;
    if (s.n < 1) problems.push_back("stage " + std::to_string(k) + ": oscillation index below 1");
    if (!(s.n < first && first <= second)) {
      problems.push_back("stage " + std::to_string(k) + ": lengths violate n < first-built <= second-built");
    }
    if (k + 1 < stages.size() && !(std::max(s.l, s.m) < stages[k + 1].n)) {
      problems.push_back("stage " + std::to_string(k) + ": next oscillation index does not exceed both lengths");
    }
    if (k < inv.trace.indices.size() && inv.trace.indices[k] != s.n) {
      problems.push_back("stage " + std::to_string(k) + ": trace index differs from stage length");
    }
  }
  return problems;
}

/// Builds x, y, z through `tree` with color(x, y, z, |target|) == target.
///
/// Stage 0 starts from the splitting node r above the root: z_0 is a
/// splitting node above r's least child; the node built first (x for bit 0,
/// y for bit 1) branches from r at the least child above z_0's last entry and
/// is pushed to a splitting node longer than z_0; the other branches from r
/// above the first one's last entry, to a splitting node at least as long.
/// Stage k+1 extends z_k by its least child above the last entries of x_k and
/// y_k, to a splitting node longer than both; then extends the first-built
/// sequence by a child above z_{k+1}'s last entry to a splitting node longer
/// than z_{k+1}, and the other by a child above that one's last entry to a
/// splitting node at least as long. After the last stage z receives one more
/// child above x and y, which realizes the final oscillation point.
///
/// The result is verified before it is returned; a failed check throws
/// invariant_violation.
template <OrderedAlphabet A>
Inversion<A> invert(const TreeOracle<A>& tree, const BitWord& target, std::size_t budget) {
  using V = typename A::value_type;
  using Node = TreeNode<A>;
  using detail::as_span;
  using detail::splitting_extension;

  auto extend = [&](Node base, const V& v) {
    base.push_back(v);
    return base;
  };
  auto last = [](const Node& node) -> std::optional<V> {
    if (node.empty()) return std::nullopt;
    return node.back();
  };
  auto larger = [](const Node& a, const Node& b) -> std::optional<V> {
    if (a.empty()) return b.empty() ? std::nullopt : std::optional<V>(b.back());
    if (b.empty()) return a.back();
    return std::max(a.back(), b.back());
  };

  Inversion<A> inv;
  const Node root;
  if (!tree.contains(root)) fail(ErrorCode::precondition, "invert: tree does not contain the empty node");

  // Stage 0.
  const bool bit0 = !target.empty() && target[0];
  const Node r = split_node(tree, as_span(root), budget);
  const V cz = child_above(tree, as_span(r), std::nullopt, budget);
  Node z = splitting_extension(tree, extend(r, cz), r.size() + 1, budget);

  auto build_pair = [&](const Node& first_base, const Node& second_base, const Node& zk, Node& first, Node& second) {
    const V j = child_above(tree, as_span(first_base), last(zk), budget);
    first = splitting_extension(tree, extend(first_base, j), zk.size() + 1, budget);
    const V h = child_above(tree, as_span(second_base), last(first), budget);
    second = splitting_extension(tree, extend(second_base, h), first.size(), budget);
  };

  Node x;
  Node y;
  if (!bit0) {
    build_pair(r, r, z, x, y);
  } else {
    build_pair(r, r, z, y, x);
  }

  auto record = [&](bool bit) {
    inv.trace.stages.push_back({x, y, z, x.size(), y.size(), z.size(), bit});
  };

  if (target.empty()) {
    // Nothing to realize: return the prepared base triple. Its oscillation
    // point z_0 has no visible z entry past it, so the observed set is empty.
    inv.x = std::move(x);
    inv.y = std::move(y);
    inv.z = std::move(z);
  } else {
    record(bit0);
    inv.trace.indices.push_back(z.size());
    inv.trace.bits.push_back(bit0);

    for (std::size_t k = 1; k <= target.size(); ++k) {
      const V i = child_above(tree, as_span(z), larger(x, y), budget);
      if (k == target.size()) {
        z.push_back(i);
        break;
      }
      const std::size_t min_n = std::max(x.size(), y.size()) + 1;
      z = splitting_extension(tree, extend(z, i), min_n, budget);
      const bool bit = target[k];
      Node nx;
      Node ny;
      if (!bit) {
        build_pair(x, y, z, nx, ny);
      } else {
        build_pair(y, x, z, ny, nx);
      }
      x = std::move(nx);
      y = std::move(ny);
      record(bit);
      inv.trace.indices.push_back(z.size());
      inv.trace.bits.push_back(bit);
    }
    inv.x = std::move(x);
    inv.y = std::move(y);
    inv.z = std::move(z);
  }

  auto problems = verify_inversion(tree, inv, target);
  if (!problems.empty()) fail(ErrorCode::invariant_violation, "invert: " + problems.front());
  return inv;
}

struct SurjectivityRow {
  BitWord word;
  bool success = false;
  bool verified = false;
  std::string detail;
};

struct SurjectivityReport {
  std::string tree;
  std::size_t word_len = 0;
  std::vector<SurjectivityRow> rows;

  std::size_t verified_count() const {
    return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const auto& r) { return r.verified; }));
  }
  bool ok() const { return verified_count() == rows.size(); }
};

/// Runs the inverter on every word of the given length and re-verifies each
/// output independently of the inverter's own check.
template <OrderedAlphabet A>
SurjectivityReport surjectivity_check(const TreeOracle<A>& tree, std::size_t word_len, std::size_t budget) {
  SurjectivityReport report;
  report.tree = tree.describe();
  report.word_len = word_len;
  for (const auto& word : all_words(word_len)) {
    SurjectivityRow row;
    row.word = word;
    try {
      auto inv = invert(tree, word, budget);
      row.success = true;
      auto problems = verify_inversion(tree, inv, word);
      row.verified = problems.empty();
      if (!problems.empty()) row.detail = problems.front();
    } catch (const Error& e) {
      row.detail = e.what();
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace oscforce
