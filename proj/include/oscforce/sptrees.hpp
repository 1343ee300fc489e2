#pragma once

// Access interface to superperfect trees of increasing sequences over an
// ordered alphabet, the shipped tree instances, and a validator for the
// promises an oracle makes.
//
// Whether a node of a computable tree is omega-splitting is not decidable, so
// splitting is a provider promise surfaced through split_above(). The library
// only checks what it can: membership, downward closure, and that a promised
// splitting node actually exhibits children above a requested threshold.

#include <algorithm>
#include <cstddef>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "oscforce/alphabet.hpp"
#include "oscforce/error.hpp"
#include "oscforce/seqspace.hpp"

namespace oscforce {

template <OrderedAlphabet A>
using TreeNode = std::vector<typename A::value_type>;

template <class V>
bool strictly_increasing(std::span<const V> node) {
  return validate_inc(node).valid;
}

template <OrderedAlphabet A>
class TreeOracle {
 public:
  using alphabet_type = A;
  using value_type = typename A::value_type;
  using Node = TreeNode<A>;

  virtual ~TreeOracle() = default;

  virtual std::string describe() const = 0;

  virtual bool contains(std::span<const value_type> node) const = 0;

  /// A node t extending `node` that the provider promises is splitting
  /// (children unbounded in the alphabet). nullopt when none is surfaced
  /// within the budget, or when `node` is not in the tree.
  virtual std::optional<Node> split_above(std::span<const value_type> node, std::size_t budget) const = 0;

  /// Children of `node` strictly above `floor`, in increasing order, found by
  /// probing `budget` candidates in the alphabet's search order. Larger
  /// budgets see a superset.
  virtual std::vector<value_type> children_above(std::span<const value_type> node,
                                                 const std::optional<value_type>& floor,
                                                 std::size_t budget) const {
    std::optional<value_type> lo = floor;
    if (!node.empty()) {
      const value_type last = node.back();
      if (!floor.has_value() || floor.value() < last) lo = last;
    }
    Node probe(node.begin(), node.end());
    probe.push_back(value_type{});
    std::vector<value_type> out;
    for (std::size_t j = 0; j < budget; ++j) {
      probe.back() = A::above(lo, j);
      if (contains(probe)) out.push_back(probe.back());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  std::vector<value_type> children(std::span<const value_type> node, std::size_t budget) const {
    const std::optional<value_type> none;
    return children_above(node, none, budget);
  }
};

template <OrderedAlphabet A>
using TreePtr = std::shared_ptr<const TreeOracle<A>>;

// ---------------------------------------------------------------------------
// Shipped trees

/// Every strictly increasing sequence.
template <OrderedAlphabet A>
class FullTree final : public TreeOracle<A> {
 public:
  using typename TreeOracle<A>::value_type;
  using typename TreeOracle<A>::Node;

  std::string describe() const override { return "full"; }
  bool contains(std::span<const value_type> node) const override { return strictly_increasing(node); }
  std::optional<Node> split_above(std::span<const value_type> node, std::size_t) const override {
    if (!contains(node)) return std::nullopt;
    return Node(node.begin(), node.end());
  }
};

/// Entry at index i must satisfy every residue constraint that applies to
/// index i; a constraint without a depth applies everywhere. Every node is
/// promised splitting, which holds whenever the constraints per index are
/// jointly satisfiable.
struct ModConstraint {
  std::optional<std::size_t> depth;
  Nat mod = 1;
  Nat rem = 0;
};

class ConstraintTree final : public TreeOracle<Omega> {
 public:
  explicit ConstraintTree(std::vector<ModConstraint> constraints, std::string name = "constraints")
      : constraints_(std::move(constraints)), name_(std::move(name)) {
    for (const auto& c : constraints_) {
      require(c.mod >= 1, ErrorCode::precondition, "modular constraint needs mod >= 1");
      require(c.rem < c.mod, ErrorCode::precondition, "modular constraint needs rem < mod");
    }
  }

  std::string describe() const override { return name_; }

  bool contains(std::span<const Nat> node) const override {
    if (!strictly_increasing(node)) return false;
    for (std::size_t i = 0; i < node.size(); ++i) {
      for (const auto& c : constraints_) {
        if ((!c.depth || *c.depth == i) && node[i] % c.mod != c.rem) return false;
      }
    }
    return true;
  }

  std::optional<Node> split_above(std::span<const Nat> node, std::size_t) const override {
    if (!contains(node)) return std::nullopt;
    return Node(node.begin(), node.end());
  }

  const std::vector<ModConstraint>& constraints() const noexcept { return constraints_; }

 private:
  std::vector<ModConstraint> constraints_;
  std::string name_;
};

/// Nodes of even length split into every larger value; a node of odd length
/// has the single child last+1. Splitting nodes therefore sit only at even
/// depths.
class CombTree final : public TreeOracle<Omega> {
 public:
  std::string describe() const override { return "comb"; }

  bool contains(std::span<const Nat> node) const override {
    if (!strictly_increasing(node)) return false;
    for (std::size_t i = 1; i < node.size(); i += 2) {
      if (node[i] != node[i - 1] + 1) return false;
    }
    return true;
  }

  std::optional<Node> split_above(std::span<const Nat> node, std::size_t budget) const override {
    if (!contains(node)) return std::nullopt;
    Node t(node.begin(), node.end());
    if (t.size() % 2 == 1) {
      if (budget == 0) return std::nullopt;
      t.push_back(checked_add(t.back(), 1));
    }
    return t;
  }
};

namespace detail {

inline Nat splitmix64(Nat x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace detail

/// Deterministic pseudo-random superperfect tree, expanded lazily from a
/// hash of the path. A splitting node admits an infinite arithmetic
/// progression of children above its last entry; a non-splitting node has a
/// single child. At most two non-splitting nodes occur in a row, so a
/// splitting node lies at most two steps above any node.
template <OrderedAlphabet A>
class RandomSuperperfectTree final : public TreeOracle<A> {
 public:
  using typename TreeOracle<A>::value_type;
  using typename TreeOracle<A>::Node;

  static constexpr std::size_t kMaxRun = 2;

  explicit RandomSuperperfectTree(Nat seed) : seed_(seed) {}

  std::string describe() const override { return "rand:" + std::to_string(seed_); }
  Nat seed() const noexcept { return seed_; }

  bool contains(std::span<const value_type> node) const override {
    State st = root_state();
    for (const auto& v : node) {
      if (!admits(st, v)) return false;
      st = step(st, v);
    }
    return true;
  }

  std::optional<Node> split_above(std::span<const value_type> node, std::size_t budget) const override {
    State st = root_state();
    for (const auto& v : node) {
      if (!admits(st, v)) return std::nullopt;
      st = step(st, v);
    }
    Node t(node.begin(), node.end());
    for (std::size_t used = 0; !st.splitting; ++used) {
      if (used >= budget) return std::nullopt;
      const value_type v = A::progression(st.last, st.offset, 1, 0);
      t.push_back(v);
      st = step(st, v);
    }
    return t;
  }

 private:
  struct State {
    Nat hash = 0;
    std::optional<value_type> last;
    std::size_t run = 0;  // consecutive non-splitting ancestors ending here
    bool splitting = true;
    Nat offset = 0;
    Nat stride = 1;
  };

  State classify(Nat hash, std::optional<value_type> last, std::size_t run) const {
    State st;
    st.hash = hash;
    st.last = std::move(last);
    st.run = run;
    st.splitting = run >= kMaxRun || ((hash >> 11) % 3) != 0;
    st.offset = (hash >> 3) % 4;
    st.stride = 1 + (hash >> 23) % 3;
    return st;
  }

  State root_state() const { return classify(detail::splitmix64(seed_), std::nullopt, 0); }

  bool admits(const State& st, const value_type& v) const {
    if (!st.splitting) return v == A::progression(st.last, st.offset, 1, 0);
    return A::progression_index(st.last, st.offset, st.stride, v).has_value();
  }

  State step(const State& st, const value_type& v) const {
    const Nat h = detail::splitmix64(st.hash ^ detail::splitmix64(A::encode(v) + 0x51ED270B27ULL));
    return classify(h, v, st.splitting ? 0 : st.run + 1);
  }

  Nat seed_;
};

/// Nodes in both trees. Splitting is promised only at nodes both providers
/// promise as splitting; validate_tree can refute the combination.
template <OrderedAlphabet A>
class GraftTree final : public TreeOracle<A> {
 public:
  using typename TreeOracle<A>::value_type;
  using typename TreeOracle<A>::Node;

  GraftTree(TreePtr<A> first, TreePtr<A> second) : first_(std::move(first)), second_(std::move(second)) {}

  std::string describe() const override { return "graft(" + first_->describe() + "," + second_->describe() + ")"; }

  bool contains(std::span<const value_type> node) const override {
    return first_->contains(node) && second_->contains(node);
  }

  std::optional<Node> split_above(std::span<const value_type> node, std::size_t budget) const override {
    if (!contains(node)) return std::nullopt;
    Node t(node.begin(), node.end());
    for (std::size_t round = 0; round <= budget; ++round) {
      auto a = first_->split_above(t, budget);
      if (!a || !second_->contains(*a)) return std::nullopt;
      auto b = second_->split_above(*a, budget);
      if (!b || !first_->contains(*b)) return std::nullopt;
      if (*b == *a && *a == t) return t;
      t = std::move(*b);
    }
    return std::nullopt;
  }

 private:
  TreePtr<A> first_;
  TreePtr<A> second_;
};

template <OrderedAlphabet A>
TreePtr<A> full_tree() {
  return std::make_shared<FullTree<A>>();
}

inline TreePtr<Omega> even_tree() {
  return std::make_shared<ConstraintTree>(std::vector<ModConstraint>{{std::nullopt, 2, 0}}, "even");
}

inline TreePtr<Omega> comb_tree() { return std::make_shared<CombTree>(); }

inline TreePtr<Omega> constraint_tree(std::vector<ModConstraint> constraints) {
  return std::make_shared<ConstraintTree>(std::move(constraints));
}

template <OrderedAlphabet A>
TreePtr<A> rand_sptree(Nat seed) {
  return std::make_shared<RandomSuperperfectTree<A>>(seed);
}

template <OrderedAlphabet A>
TreePtr<A> graft(TreePtr<A> first, TreePtr<A> second) {
  return std::make_shared<GraftTree<A>>(std::move(first), std::move(second));
}

// ---------------------------------------------------------------------------
// Library operations over oracles

/// Promised splitting node above `above`, checked for membership, for
/// extending `above`, and for exhibiting at least one child within budget.
template <OrderedAlphabet A>
TreeNode<A> split_node(const TreeOracle<A>& tree, std::span<const typename A::value_type> above,
                       std::size_t budget) {
  if (!tree.contains(above)) fail(ErrorCode::precondition, "split_node: starting node is not in the tree");
  auto t = tree.split_above(above, budget);
  if (!t) fail(ErrorCode::budget_exhausted, "no splitting node surfaced within budget in " + tree.describe());
  if (t->size() < above.size() || !std::equal(above.begin(), above.end(), t->begin())) {
    fail(ErrorCode::invariant_violation, "oracle returned a splitting node that does not extend its argument");
  }
  if (!tree.contains(*t)) fail(ErrorCode::invariant_violation, "oracle returned a splitting node outside the tree");
  if (tree.children(*t, budget).empty()) {
    fail(ErrorCode::budget_exhausted, "promised splitting node shows no children within budget");
  }
  return *t;
}

/// Least child of `node` strictly above `threshold` (and above node's last
/// entry) among the candidates probed within budget.
template <OrderedAlphabet A>
typename A::value_type child_above(const TreeOracle<A>& tree, std::span<const typename A::value_type> node,
                                   const std::optional<typename A::value_type>& threshold, std::size_t budget) {
  auto kids = tree.children_above(node, threshold, budget);
  if (kids.empty()) {
    fail(ErrorCode::budget_exhausted,
         "oracle could not witness a child above the threshold within budget in " + tree.describe());
  }
  TreeNode<A> probe(node.begin(), node.end());
  probe.push_back(kids.front());
  if (!tree.contains(probe) || (threshold && !(*threshold < kids.front()))) {
    fail(ErrorCode::invariant_violation, "oracle reported a child that is not admissible");
  }
  return kids.front();
}

template <OrderedAlphabet A>
struct TreeViolation {
  TreeNode<A> node;
  std::string kind;
  std::string detail;
};

template <OrderedAlphabet A>
struct TreeReport {
  std::size_t nodes_checked = 0;
  std::vector<TreeViolation<A>> violations;

  bool ok() const noexcept { return violations.empty(); }
};

/// Walks every node reachable through children() up to `depth` and checks
/// membership, downward closure of every oracle-returned node, budget
/// monotonicity, and that each promised splitting node extends its argument,
/// lies in the tree, and shows children.
template <OrderedAlphabet A>
TreeReport<A> validate_tree(const TreeOracle<A>& tree, std::size_t depth, std::size_t budget) {
  using Node = TreeNode<A>;
  TreeReport<A> report;
  auto violation = [&](const Node& node, std::string kind, std::string detail) {
    report.violations.push_back({node, std::move(kind), std::move(detail)});
  };
  auto closed = [&](const Node& node) {
    for (std::size_t len = 0; len <= node.size(); ++len) {
      if (!tree.contains(std::span(node.data(), len))) return false;
    }
    return true;
  };

  const Node root;
  if (!tree.contains(root)) {
    violation(root, "not-member", "the empty node is not in the tree");
    return report;
  }

  std::vector<Node> frontier{root};
  for (std::size_t level = 0; level <= depth && !frontier.empty(); ++level) {
    std::vector<Node> next;
    for (const Node& node : frontier) {
      ++report.nodes_checked;
      if (!strictly_increasing(std::span<const typename A::value_type>(node))) {
        violation(node, "not-increasing", "node entries are not strictly increasing");
      }
      if (auto split = tree.split_above(node, budget)) {
        if (split->size() < node.size() || !std::equal(node.begin(), node.end(), split->begin())) {
          violation(node, "split-not-extension", "split_above returned a node not extending its argument");
        } else if (!closed(*split)) {
          violation(*split, "split-not-member", "split_above returned a node with a prefix outside the tree");
        } else if (tree.children(*split, budget).empty()) {
          violation(*split, "split-no-children", "promised splitting node has no children within budget");
        }
      } else {
        violation(node, "split-missing", "no splitting node surfaced within budget");
      }
      if (level == depth) continue;

      const auto kids = tree.children(node, budget);
      const auto half = tree.children(node, budget / 2);
      if (!std::includes(kids.begin(), kids.end(), half.begin(), half.end())) {
        violation(node, "budget-non-monotone", "children at half budget are not a subset");
      }
      for (const auto& v : kids) {
        Node child = node;
        child.push_back(v);
        if (!node.empty() && !(node.back() < v)) {
          violation(child, "child-not-increasing", "child value does not exceed the parent's last entry");
        } else if (!tree.contains(child)) {
          violation(child, "child-not-member", "reported child is not in the tree");
        } else {
          next.push_back(std::move(child));
        }
      }
    }
    frontier = std::move(next);
  }
  return report;
}

}  // namespace oscforce
