#pragma once

// The poset of finite uniform-height binary trees used to add a perfect set
// of mutually generic Cohen reals: conditions, their order, generic prefixes
// built by meeting splitting requirements and lifted Cohen requirements, and
// certification of the branch tuples.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "oscforce/error.hpp"
#include "oscforce/forcing.hpp"
#include "oscforce/seqspace.hpp"

namespace oscforce {

/// A finite binary tree all of whose maximal nodes have length m. Stored by
/// its frontier (the nodes of length m); every other node is a prefix of one.
class PerfectCondition {
 public:
  PerfectCondition() : frontier_{BitWord{}} {}

  /// Throws unless the frontier is nonempty and every word has length m.
  PerfectCondition(std::size_t m, std::vector<BitWord> frontier) : m_(m), frontier_(std::move(frontier)) {
    std::sort(frontier_.begin(), frontier_.end());
    frontier_.erase(std::unique(frontier_.begin(), frontier_.end()), frontier_.end());
    require(!frontier_.empty(), ErrorCode::precondition, "perfect condition needs a nonempty frontier");
    for (const auto& f : frontier_) {
      require(f.size() == m_, ErrorCode::precondition, "frontier word '" + f.str() + "' does not have length m");
    }
  }

  std::size_t m() const noexcept { return m_; }
  const std::vector<BitWord>& frontier() const noexcept { return frontier_; }

  /// Every node, in lexicographic order.
  std::vector<BitWord> nodes() const {
    std::set<BitWord> out;
    for (const auto& f : frontier_) {
      for (std::size_t len = 0; len <= m_; ++len) out.insert(f.prefix(len));
    }
    return {out.begin(), out.end()};
  }

  bool has_node(const BitWord& w) const {
    if (w.size() > m_) return false;
    auto it = std::lower_bound(frontier_.begin(), frontier_.end(), w);
    return it != frontier_.end() && w.is_prefix_of(*it);
  }

  /// Frontier nodes extending w.
  std::vector<BitWord> frontier_above(const BitWord& w) const {
    std::vector<BitWord> out;
    for (auto it = std::lower_bound(frontier_.begin(), frontier_.end(), w);
         it != frontier_.end() && w.is_prefix_of(*it); ++it) {
      out.push_back(*it);
    }
    return out;
  }

  /// The nodes of length <= height.
  PerfectCondition truncated(std::size_t height) const {
    require(height <= m_, ErrorCode::precondition, "cannot truncate above the frontier height");
    std::vector<BitWord> cut;
    for (const auto& f : frontier_) cut.push_back(f.prefix(height));
    return {height, std::move(cut)};
  }

  friend bool operator==(const PerfectCondition&, const PerfectCondition&) = default;
  friend auto operator<=>(const PerfectCondition&, const PerfectCondition&) = default;

 private:
  std::size_t m_ = 0;
  std::vector<BitWord> frontier_;
};

/// T_g truncated to a depth: same shape, depth = m.
using PerfectTreePrefix = PerfectCondition;

struct PCondVerdict {
  bool valid = true;
  std::string first_violation;
};

/// Checks a raw node set against the three condition invariants.
inline PCondVerdict pcond_validate(std::size_t m, const std::vector<BitWord>& nodes) {
  const std::set<BitWord> set(nodes.begin(), nodes.end());
  if (!set.count(BitWord{})) return {false, "the empty word is missing"};
  for (const auto& w : set) {
    if (w.size() > m) return {false, "node '" + w.str() + "' is longer than m"};
    if (!w.empty() && !set.count(w.prefix(w.size() - 1))) {
      return {false, "node '" + w.str() + "' has no parent in the set"};
    }
    bool reaches = false;
    for (auto it = set.lower_bound(w); it != set.end() && w.is_prefix_of(*it); ++it) {
      if (it->size() == m) {
        reaches = true;
        break;
      }
    }
    if (!reaches) return {false, "node '" + w.str() + "' has no extension of height " + std::to_string(m)};
  }
  return {};
}

/// Canonical condition from a raw node set; throws if invalid.
inline PerfectCondition pcond_from_nodes(std::size_t m, const std::vector<BitWord>& nodes) {
  auto verdict = pcond_validate(m, nodes);
  if (!verdict.valid) fail(ErrorCode::precondition, "invalid perfect condition: " + verdict.first_violation);
  std::vector<BitWord> frontier;
  for (const auto& w : nodes) {
    if (w.size() == m) frontier.push_back(w);
  }
  return {m, std::move(frontier)};
}

/// tau <= sigma iff tau restricted to height m(sigma) is sigma.
inline bool pcond_leq(const PerfectCondition& tau, const PerfectCondition& sigma) {
  if (tau.m() < sigma.m()) return false;
  return tau.truncated(sigma.m()) == sigma;
}

class PerfectPoset {
 public:
  using condition_type = PerfectCondition;

  PerfectCondition root() const { return {}; }
  bool valid(const PerfectCondition&) const { return true; }
  bool leq(const PerfectCondition& q, const PerfectCondition& p) const { return pcond_leq(q, p); }
  /// Two conditions have a common extension iff one extends the other.
  bool compatible(const PerfectCondition& p, const PerfectCondition& q) const { return leq(p, q) || leq(q, p); }
  std::optional<PerfectCondition> meet(const PerfectCondition& p, const PerfectCondition& q) const {
    if (leq(p, q)) return p;
    if (leq(q, p)) return q;
    return std::nullopt;
  }
};

static_assert(Poset<PerfectPoset>);

namespace detail {

inline BitWord padded(BitWord w, std::size_t len) {
  while (w.size() < len) w.push_back(false);
  return w;
}

/// Calls body on every injective k-tuple over [0, count) in lexicographic
/// order until it returns false.
template <class F>
bool for_each_injective(std::size_t count, std::size_t k, const F& body) {
  std::vector<std::size_t> idx;
  std::vector<bool> used(count, false);
  auto visit = [&](auto&& self) -> bool {
    if (idx.size() == k) return body(std::as_const(idx));
    for (std::size_t i = 0; i < count; ++i) {
      if (used[i]) continue;
      used[i] = true;
      idx.push_back(i);
      const bool go_on = self(self);
      idx.pop_back();
      used[i] = false;
      if (!go_on) return false;
    }
    return true;
  };
  return count < k || visit(visit);
}

}  // namespace detail

/// Every node of length level has at least two frontier extensions (so m >
/// level). The refiner pads to height `level` if needed and then splits the
/// single frontier extension of every node that has only one; other frontier
/// nodes are padded with 0.
inline DenseReq<PerfectCondition> split_requirement(std::size_t level) {
  auto member = [level](const PerfectCondition& p) {
    if (p.m() <= level) return false;
    std::set<BitWord> seen;
    for (const auto& f : p.frontier()) seen.insert(f.prefix(level));
    for (const auto& w : seen) {
      if (p.frontier_above(w).size() < 2) return false;
    }
    return true;
  };
  return {"split(" + std::to_string(level) + ")", member,
          [=](const PerfectCondition& p) {
            if (member(p)) return p;
            PerfectCondition base = p;
            if (base.m() < level) {
              std::vector<BitWord> grown;
              for (const auto& f : base.frontier()) grown.push_back(detail::padded(f, level));
              base = PerfectCondition(level, std::move(grown));
            }
            std::vector<BitWord> next;
            for (const auto& f : base.frontier()) {
              if (base.frontier_above(f.prefix(level)).size() < 2) {
                next.push_back(f.appended(false));
                next.push_back(f.appended(true));
              } else {
                next.push_back(f.appended(false));
              }
            }
            return PerfectCondition(base.m() + 1, std::move(next));
          },
          true};
}

/// Split levels for a target depth: first depth - 2^j for each j with that
/// value >= 0, ascending, then every other level below depth. The first group
/// already forces every node of length < depth to split by depth; the rest
/// are checked but met without change. Frontier size at depth is
/// 2^(floor(log2 depth) + 1).
inline std::vector<std::size_t> split_schedule(std::size_t depth) {
  std::vector<std::size_t> first;
  for (std::size_t step = 1; step <= depth; step *= 2) first.push_back(depth - step);
  std::sort(first.begin(), first.end());
  std::vector<std::size_t> out = first;
  for (std::size_t level = 0; level < depth; ++level) {
    if (!std::binary_search(first.begin(), first.end(), level)) out.push_back(level);
  }
  return out;
}

/// Lifts an open requirement over C(k) to the perfect-set poset: every
/// ordered k-tuple of distinct frontier nodes, read as a condition in C(k),
/// must be a member. The refiner visits the tuples in a fixed order and
/// applies the requirement's refiner to each failing one; the new cells
/// extend the tuple's frontier nodes (unassigned positions read 0) and all
/// other frontier nodes are padded with 0.
inline DenseReq<PerfectCondition> lift_requirement(const DenseReq<CohenCondition>& req, std::size_t k) {
  require(req.open, ErrorCode::precondition, "only open requirements can be lifted: " + req.name);
  require(k >= 1, ErrorCode::precondition, "lifting needs k >= 1");

  auto for_each_tuple = [k](std::size_t count, const auto& body) {
    return detail::for_each_injective(count, k, body);
  };
  auto tuple_of = [](const std::vector<BitWord>& frontier, const std::vector<std::size_t>& idx) {
    std::vector<BitWord> reals;
    for (auto i : idx) reals.push_back(frontier[i]);
    return tuple_condition(reals);
  };

  auto member = [=](const PerfectCondition& p) {
    const auto& fr = p.frontier();
    return for_each_tuple(fr.size(), [&](const std::vector<std::size_t>& idx) { return req.member(tuple_of(fr, idx)); });
  };
  auto refine = [=](const PerfectCondition& p) {
    std::vector<BitWord> fr = p.frontier();
    std::size_t m = p.m();
    for_each_tuple(fr.size(), [&](const std::vector<std::size_t>& idx) {
      const CohenCondition tc = tuple_of(fr, idx);
      if (req.member(tc)) return true;
      const CohenCondition q = req.refine(tc);
      if (!tc.subset_of(q) || !req.member(q)) {
        fail(ErrorCode::refine_failure, "lifted requirement " + req.name + ": C(k) refiner broke its contract");
      }
      std::size_t top = m;
      for (const auto& [key, bit] : q) {
        require(key.i < k, ErrorCode::refine_failure, "lifted requirement " + req.name + ": cell outside C(k)");
        top = std::max<std::size_t>(top, key.n + 1);
      }
      std::vector<bool> in_tuple(fr.size(), false);
      for (std::size_t c = 0; c < k; ++c) {
        in_tuple[idx[c]] = true;
        BitWord& w = fr[idx[c]];
        for (std::size_t n = m; n < top; ++n) w.push_back(q.get({n, c}).value_or(false));
      }
      for (std::size_t f = 0; f < fr.size(); ++f) {
        if (!in_tuple[f]) fr[f] = detail::padded(fr[f], top);
      }
      m = top;
      return true;
    });
    return PerfectCondition(m, std::move(fr));
  };
  return {"lift" + std::to_string(k) + ":" + req.name, member, refine, true};
}

/// Differences between every pair of coordinates, every coordinate defined
/// below `upto`, and every joint pattern of single bits, over C(k).
inline std::vector<DenseReq<CohenCondition>> default_cohen_family(std::size_t k, std::size_t upto) {
  std::vector<DenseReq<CohenCondition>> out;
  for (Nat i = 0; i < k; ++i) {
    for (Nat j = i + 1; j < k; ++j) out.push_back(coordinates_differ(i, j));
  }
  for (Nat i = 0; i < k; ++i) out.push_back(defined_upto(i, upto));
  for (Nat code = 0; code < (Nat{1} << k); ++code) {
    std::vector<BitWord> words;
    for (Nat c = 0; c < k; ++c) words.push_back(BitWord(((code >> c) & 1U) ? "1" : "0"));
    out.push_back(joint_pattern(std::move(words)));
  }
  return out;
}

inline std::vector<DenseReq<PerfectCondition>> lift_family(const std::vector<DenseReq<CohenCondition>>& family,
                                                           std::size_t k) {
  std::vector<DenseReq<PerfectCondition>> out;
  for (const auto& r : family) out.push_back(lift_requirement(r, k));
  return out;
}

/// The lifted default families for k = 2 and k = 3.
inline std::vector<DenseReq<PerfectCondition>> default_lifted_family(std::size_t depth) {
  auto out = lift_family(default_cohen_family(2, depth), 2);
  auto three = lift_family(default_cohen_family(3, depth), 3);
  out.insert(out.end(), three.begin(), three.end());
  return out;
}

struct PGeneric {
  PerfectTreePrefix prefix;
  std::vector<PerfectCondition> chain;
  /// The last condition of the chain; its frontier extends the prefix's
  /// branches one-to-one.
  PerfectCondition generic;
};

/// Every node of length < depth has two distinct extensions of length depth.
inline bool finitely_perfect(const PerfectTreePrefix& prefix) {
  for (const auto& w : prefix.nodes()) {
    if (w.size() < prefix.m() && prefix.frontier_above(w).size() < 2) return false;
  }
  return true;
}

/// Meets the split requirements for `depth` and then `reqs` in order, from
/// the root condition.
inline PGeneric pgeneric_tree(const std::vector<DenseReq<PerfectCondition>>& reqs, std::size_t depth) {
  std::vector<DenseReq<PerfectCondition>> all;
  for (auto level : split_schedule(depth)) all.push_back(split_requirement(level));
  all.insert(all.end(), reqs.begin(), reqs.end());

  const PerfectPoset poset;
  PGeneric out;
  out.chain = rs_generic(poset, all, poset.root());
  out.generic = out.chain.back();
  if (out.generic.m() < depth) fail(ErrorCode::invariant_violation, "generic condition is shorter than the depth");
  out.prefix = out.generic.truncated(depth);
  auto verdict = pcond_validate(out.prefix.m(), out.prefix.nodes());
  if (!verdict.valid) fail(ErrorCode::invariant_violation, "generic prefix is invalid: " + verdict.first_violation);
  if (!finitely_perfect(out.prefix)) fail(ErrorCode::invariant_violation, "generic prefix is not perfect at its depth");
  return out;
}

/// Nodes of maximal length, lexicographic.
inline std::vector<BitWord> branches(const PerfectTreePrefix& prefix) { return prefix.frontier(); }

struct TupleCert {
  std::vector<std::size_t> branch_indices;
  std::vector<GenericityVerdict> verdicts;
};

struct PerfectCert {
  std::size_t k = 0;
  std::size_t budget = 0;
  std::vector<TupleCert> tuples;
  std::size_t met = 0;
  std::size_t not_met = 0;
  std::size_t unknown = 0;

  bool ok() const noexcept { return not_met == 0 && unknown == 0; }
};

/// Runs mutual_genericity_check on every ordered k-tuple of distinct branches.
inline PerfectCert perfect_mutual_cert(const PerfectTreePrefix& prefix, std::size_t k,
                                       const std::vector<DenseReq<CohenCondition>>& reqs, std::size_t budget) {
  const auto bs = branches(prefix);
  require(k <= bs.size(), ErrorCode::precondition,
          "k = " + std::to_string(k) + " exceeds the " + std::to_string(bs.size()) + " branches");
  PerfectCert cert;
  cert.k = k;
  cert.budget = budget;

  detail::for_each_injective(bs.size(), k, [&](const std::vector<std::size_t>& idx) {
    std::vector<BitWord> reals;
    for (auto i : idx) reals.push_back(bs[i]);
    TupleCert row{idx, mutual_genericity_check(reals, reqs, budget)};
    for (const auto& v : row.verdicts) {
      switch (v.kind) {
        case Genericity::met: ++cert.met; break;
        case Genericity::not_met_on_window: ++cert.not_met; break;
        case Genericity::unknown: ++cert.unknown; break;
      }
    }
    cert.tuples.push_back(std::move(row));
    return true;
  });
  return cert;
}

}  // namespace oscforce
