#pragma once

// Finite-condition forcing posets and the constructions run on them.
//
// Order convention: q <= p ("q is stronger") iff p is a subset of q, so a
// refinement only ever adds information. Dense sets are supplied as
// requirements carrying a decidable membership test and a refiner; every
// refiner output is re-checked by the library.

#include <algorithm>
#include <compare>
#include <concepts>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "oscforce/error.hpp"
#include "oscforce/seqspace.hpp"

namespace oscforce {

/// Finite partial function stored as a key-sorted vector of cells.
template <class K, class V>
class PartialFunction {
 public:
  using key_type = K;
  using mapped_type = V;
  using Cell = std::pair<K, V>;

  PartialFunction() = default;

  /// Throws if two cells share a key with different values.
  explicit PartialFunction(std::vector<Cell> cells) : cells_(std::move(cells)) {
    std::sort(cells_.begin(), cells_.end());
    cells_.erase(std::unique(cells_.begin(), cells_.end()), cells_.end());
    for (std::size_t k = 1; k < cells_.size(); ++k) {
      if (cells_[k - 1].first == cells_[k].first) fail(ErrorCode::precondition, "partial function assigns a key twice");
    }
  }

  static PartialFunction from_sorted_unchecked(std::vector<Cell> cells) {
    PartialFunction out;
    out.cells_ = std::move(cells);
    return out;
  }

  std::size_t size() const noexcept { return cells_.size(); }
  bool empty() const noexcept { return cells_.empty(); }
  const std::vector<Cell>& cells() const noexcept { return cells_; }
  auto begin() const noexcept { return cells_.begin(); }
  auto end() const noexcept { return cells_.end(); }

  std::optional<V> get(const K& key) const {
    auto it = find(key);
    if (it == cells_.end()) return std::nullopt;
    return it->second;
  }
  bool defines(const K& key) const { return find(key) != cells_.end(); }

  /// Adds key -> value; throws if key is already mapped elsewhere.
  PartialFunction with(const K& key, const V& value) const {
    PartialFunction out = *this;
    out.set(key, value);
    return out;
  }
  void set(const K& key, const V& value) {
    auto it = std::lower_bound(cells_.begin(), cells_.end(), key,
                               [](const Cell& c, const K& k) { return c.first < k; });
    if (it != cells_.end() && it->first == key) {
      if (!(it->second == value)) fail(ErrorCode::precondition, "partial function already maps this key elsewhere");
      return;
    }
    cells_.insert(it, Cell{key, value});
  }

  bool subset_of(const PartialFunction& other) const {
    auto it = other.cells_.begin();
    for (const auto& c : cells_) {
      it = std::lower_bound(it, other.cells_.end(), c.first,
                            [](const Cell& x, const K& k) { return x.first < k; });
      if (it == other.cells_.end() || !(*it == c)) return false;
    }
    return true;
  }

  bool compatible_with(const PartialFunction& other) const {
    auto a = cells_.begin();
    auto b = other.cells_.begin();
    while (a != cells_.end() && b != other.cells_.end()) {
      if (a->first < b->first) {
        ++a;
      } else if (b->first < a->first) {
        ++b;
      } else {
        if (!(a->second == b->second)) return false;
        ++a;
        ++b;
      }
    }
    return true;
  }

  std::optional<PartialFunction> merged(const PartialFunction& other) const {
    if (!compatible_with(other)) return std::nullopt;
    std::vector<Cell> out;
    out.reserve(size() + other.size());
    std::set_union(cells_.begin(), cells_.end(), other.cells_.begin(), other.cells_.end(), std::back_inserter(out),
                   [](const Cell& x, const Cell& y) { return x.first < y.first; });
    return from_sorted_unchecked(std::move(out));
  }

  friend bool operator==(const PartialFunction&, const PartialFunction&) = default;
  friend auto operator<=>(const PartialFunction&, const PartialFunction&) = default;

 private:
  auto find(const K& key) const {
    auto it = std::lower_bound(cells_.begin(), cells_.end(), key,
                               [](const Cell& c, const K& k) { return c.first < k; });
    return (it != cells_.end() && it->first == key) ? it : cells_.end();
  }

  std::vector<Cell> cells_;
};

/// Cell (n, i): bit n of the i-th Cohen real.
struct CohenKey {
  Nat n = 0;
  Nat i = 0;

  friend auto operator<=>(const CohenKey&, const CohenKey&) = default;
  friend bool operator==(const CohenKey&, const CohenKey&) = default;
};

using CohenCondition = PartialFunction<CohenKey, bool>;
using CollapseCondition = PartialFunction<Nat, Nat>;

template <class P>
concept Poset = requires(const P& poset, const typename P::condition_type& p) {
  typename P::condition_type;
  { poset.root() } -> std::same_as<typename P::condition_type>;
  { poset.valid(p) } -> std::same_as<bool>;
  { poset.leq(p, p) } -> std::same_as<bool>;
  { poset.compatible(p, p) } -> std::same_as<bool>;
  { poset.meet(p, p) } -> std::same_as<std::optional<typename P::condition_type>>;
};

/// Shared order structure of the posets of finite partial functions ordered
/// by reverse inclusion.
template <class Derived, class Cond>
class PartialFunctionPoset {
 public:
  using condition_type = Cond;

  Cond root() const { return Cond{}; }
  bool leq(const Cond& q, const Cond& p) const { return p.subset_of(q); }
  bool compatible(const Cond& p, const Cond& q) const { return p.compatible_with(q); }
  std::optional<Cond> meet(const Cond& p, const Cond& q) const { return p.merged(q); }
};

/// Finite partial functions from N x index_size to {0,1}.
class CohenPoset : public PartialFunctionPoset<CohenPoset, CohenCondition> {
 public:
  explicit CohenPoset(Nat index_size) : index_size_(index_size) {}

  Nat index_size() const noexcept { return index_size_; }
  bool valid(const CohenCondition& p) const {
    return std::all_of(p.begin(), p.end(), [&](const auto& c) { return c.first.i < index_size_; });
  }

 private:
  Nat index_size_;
};

/// Finite partial functions from N to {0, ..., delta-1}.
class CollapsePoset : public PartialFunctionPoset<CollapsePoset, CollapseCondition> {
 public:
  explicit CollapsePoset(Nat delta) : delta_(delta) {
    require(delta >= 1, ErrorCode::precondition, "collapse poset needs delta >= 1");
  }

  Nat delta() const noexcept { return delta_; }
  bool valid(const CollapseCondition& p) const {
    return std::all_of(p.begin(), p.end(), [&](const auto& c) { return c.second < delta_; });
  }

 private:
  Nat delta_;
};

inline CohenPoset cohen_poset(Nat index_size) { return CohenPoset(index_size); }
inline CollapsePoset collapse_poset(Nat delta) { return CollapsePoset(delta); }

static_assert(Poset<CohenPoset>);
static_assert(Poset<CollapsePoset>);

// ---------------------------------------------------------------------------
// Dense requirements and generic chains

template <class Cond>
struct DenseReq {
  std::string name;
  std::function<bool(const Cond&)> member;
  std::function<Cond(const Cond&)> refine;
  /// Membership is closed under strengthening.
  bool open = true;
};

/// Checks one refiner call; throws refine_failure naming the requirement.
template <Poset P>
typename P::condition_type checked_refine(const P& poset, const DenseReq<typename P::condition_type>& req,
                                          const typename P::condition_type& p, std::size_t index) {
  auto where = [&] { return "requirement " + std::to_string(index) + " (" + req.name + ")"; };
  typename P::condition_type q;
  try {
    q = req.refine(p);
  } catch (const Error& e) {
    fail(ErrorCode::refine_failure, where() + ": " + e.what());
  }
  if (!poset.valid(q)) fail(ErrorCode::refine_failure, where() + ": refiner left the poset");
  if (!poset.leq(q, p)) fail(ErrorCode::refine_failure, where() + ": refiner output is not stronger");
  if (!req.member(q)) fail(ErrorCode::refine_failure, where() + ": refiner output is not a member");
  return q;
}

/// Descending chain start = p_0 >= p_1 >= ... with p_{n+1} in reqs[n].
template <Poset P>
std::vector<typename P::condition_type> rs_generic(const P& poset,
                                                   const std::vector<DenseReq<typename P::condition_type>>& reqs,
                                                   const typename P::condition_type& start) {
  require(poset.valid(start), ErrorCode::precondition, "rs_generic: start condition is not in the poset");
  std::vector<typename P::condition_type> chain{start};
  chain.reserve(reqs.size() + 1);
  for (std::size_t n = 0; n < reqs.size(); ++n) chain.push_back(checked_refine(poset, reqs[n], chain.back(), n));
  return chain;
}

// Shipped requirements over C(k).

inline DenseReq<CohenCondition> cell_defined(Nat n, Nat i) {
  const CohenKey key{n, i};
  return {"cell(" + std::to_string(n) + "," + std::to_string(i) + ")",
          [key](const CohenCondition& p) { return p.defines(key); },
          [key](const CohenCondition& p) { return p.defines(key) ? p : p.with(key, false); }, true};
}

/// All cells (n, i) with n < upto are defined.
inline DenseReq<CohenCondition> defined_upto(Nat i, Nat upto) {
  return {"defined(" + std::to_string(i) + ",<" + std::to_string(upto) + ")",
          [=](const CohenCondition& p) {
            for (Nat n = 0; n < upto; ++n) {
              if (!p.defines({n, i})) return false;
            }
            return true;
          },
          [=](const CohenCondition& p) {
            CohenCondition q = p;
            for (Nat n = 0; n < upto; ++n) {
              if (!q.defines({n, i})) q.set({n, i}, false);
            }
            return q;
          },
          true};
}

/// Some position n where reals i and j are both defined and differ. Refines
/// at the least position where that can still be arranged.
inline DenseReq<CohenCondition> coordinates_differ(Nat i, Nat j) {
  require(i != j, ErrorCode::precondition, "coordinates_differ needs distinct coordinates");
  auto member = [=](const CohenCondition& p) {
    for (const auto& [key, bit] : p) {
      if (key.i != i) continue;
      auto other = p.get({key.n, j});
      if (other && *other != bit) return true;
    }
    return false;
  };
  return {"differ(" + std::to_string(i) + "," + std::to_string(j) + ")", member,
          [=](const CohenCondition& p) {
            if (member(p)) return p;
            for (Nat n = 0;; ++n) {
              auto a = p.get({n, i});
              auto b = p.get({n, j});
              if (a && b) continue;
              CohenCondition q = p;
              if (a) {
                q.set({n, j}, !*a);
              } else if (b) {
                q.set({n, i}, !*b);
              } else {
                q.set({n, i}, false);
                q.set({n, j}, true);
              }
              return q;
            }
          },
          true};
}

/// Some position n such that, for every coordinate c, real c reads words[c]
/// starting at n. Refines at the least n consistent with the condition.
inline DenseReq<CohenCondition> joint_pattern(std::vector<BitWord> words) {
  require(!words.empty(), ErrorCode::precondition, "joint_pattern needs at least one coordinate");
  const std::size_t len = words.front().size();
  for (const auto& w : words) require(w.size() == len, ErrorCode::precondition, "joint_pattern words differ in length");
  std::string name = "pattern(";
  for (std::size_t c = 0; c < words.size(); ++c) name += (c ? "," : "") + words[c].str();
  name += ")";

  // 1 = matches, 0 = conflicts, -1 = some cell undefined but none conflict
  auto status = [words, len](const CohenCondition& p, Nat n) {
    int out = 1;
    for (Nat c = 0; c < words.size(); ++c) {
      for (std::size_t b = 0; b < len; ++b) {
        auto v = p.get({n + b, c});
        if (!v) {
          out = -1;
        } else if (*v != words[c][b]) {
          return 0;
        }
      }
    }
    return out;
  };
  auto horizon = [](const CohenCondition& p) {
    Nat top = 0;
    for (const auto& [key, bit] : p) top = std::max(top, key.n + 1);
    return top;
  };
  auto member = [=](const CohenCondition& p) {
    if (len == 0) return true;
    const Nat top = horizon(p);
    for (Nat n = 0; n + len <= top; ++n) {
      if (status(p, n) == 1) return true;
    }
    return false;
  };
  return {name, member,
          [=](const CohenCondition& p) {
            if (member(p)) return p;
            for (Nat n = 0;; ++n) {
              if (status(p, n) == 0) continue;
              CohenCondition q = p;
              for (Nat c = 0; c < words.size(); ++c) {
                for (std::size_t b = 0; b < len; ++b) {
                  if (!q.defines({n + b, c})) q.set({n + b, c}, words[c][b]);
                }
              }
              return q;
            }
          },
          true};
}

/// Real i contains `word` at some position >= from.
inline DenseReq<CohenCondition> pattern_after(Nat i, BitWord word, Nat from) {
  auto fits = [=](const CohenCondition& p, Nat n, bool strict) {
    for (std::size_t b = 0; b < word.size(); ++b) {
      auto v = p.get({n + b, i});
      if (!v) {
        if (strict) return false;
      } else if (*v != word[b]) {
        return false;
      }
    }
    return true;
  };
  auto member = [=](const CohenCondition& p) {
    Nat top = 0;
    for (const auto& [key, bit] : p) {
      if (key.i == i) top = std::max(top, key.n + 1);
    }
    for (Nat n = from; n + word.size() <= top || (word.empty() && n == from); ++n) {
      if (fits(p, n, true)) return true;
    }
    return false;
  };
  return {"after(" + std::to_string(i) + "," + word.str() + ",>=" + std::to_string(from) + ")", member,
          [=](const CohenCondition& p) {
            if (member(p)) return p;
            for (Nat n = from;; ++n) {
              if (!fits(p, n, false)) continue;
              CohenCondition q = p;
              for (std::size_t b = 0; b < word.size(); ++b) {
                if (!q.defines({n + b, i})) q.set({n + b, i}, word[b]);
              }
              return q;
            }
          },
          true};
}

// Shipped requirements over the collapse poset.

inline DenseReq<CollapseCondition> in_domain(Nat n) {
  return {"domain(" + std::to_string(n) + ")", [n](const CollapseCondition& p) { return p.defines(n); },
          [n](const CollapseCondition& p) { return p.defines(n) ? p : p.with(n, 0); }, true};
}

/// beta is in the range; refines by mapping the least unused point to beta.
inline DenseReq<CollapseCondition> in_range(Nat beta) {
  auto member = [beta](const CollapseCondition& p) {
    return std::any_of(p.begin(), p.end(), [&](const auto& c) { return c.second == beta; });
  };
  return {"range(" + std::to_string(beta) + ")", member,
          [=](const CollapseCondition& p) {
            if (member(p)) return p;
            Nat n = 0;
            while (p.defines(n)) ++n;
            return p.with(n, beta);
          },
          true};
}

// ---------------------------------------------------------------------------
// Mutual genericity of finite tuples of reals

/// The condition in C(k) recording reals[i][n] at cell (n, i).
inline CohenCondition tuple_condition(const std::vector<BitWord>& reals) {
  std::vector<CohenCondition::Cell> cells;
  std::size_t longest = 0;
  for (const auto& r : reals) longest = std::max(longest, r.size());
  for (Nat n = 0; n < longest; ++n) {
    for (Nat i = 0; i < reals.size(); ++i) {
      if (n < reals[i].size()) cells.push_back({{n, i}, reals[i][n]});
    }
  }
  return CohenCondition::from_sorted_unchecked(std::move(cells));
}

/// Cells of p at positions below n.
inline CohenCondition restrict_below(const CohenCondition& p, Nat n) {
  std::vector<CohenCondition::Cell> cells;
  for (const auto& c : p) {
    if (c.first.n < n) cells.push_back(c);
  }
  return CohenCondition::from_sorted_unchecked(std::move(cells));
}

enum class Genericity { met, not_met_on_window, unknown };

constexpr std::string_view to_string(Genericity g) {
  switch (g) {
    case Genericity::met: return "met";
    case Genericity::not_met_on_window: return "not-met-on-window";
    case Genericity::unknown: return "unknown";
  }
  return "unknown";
}

struct GenericityVerdict {
  std::string req;
  Genericity kind = Genericity::unknown;
  /// Present iff kind == met: a member of the requirement contained in the
  /// tuple condition.
  std::optional<CohenCondition> witness;
  std::size_t evaluations = 0;
};

/// Searches, for each requirement, a member contained in the tuple condition
/// of `reals`. Each membership test spends one unit of the per-requirement
/// budget. For open requirements the full tuple condition decides the
/// question and a binary search over position cutoffs shrinks the witness;
/// otherwise prefix cutoffs are scanned and then, if the budget covers it,
/// every subset of the cells.
inline std::vector<GenericityVerdict> mutual_genericity_check(const std::vector<BitWord>& reals,
                                                              const std::vector<DenseReq<CohenCondition>>& reqs,
                                                              std::size_t budget) {
  for (const auto& r : reals) {
    require(!r.empty(), ErrorCode::precondition, "mutual_genericity_check: every real needs length >= 1");
  }
  const CohenCondition full = tuple_condition(reals);
  Nat window = 0;
  for (const auto& r : reals) window = std::max<Nat>(window, r.size());

  std::vector<GenericityVerdict> out;
  for (const auto& req : reqs) {
    GenericityVerdict v;
    v.req = req.name;
    auto test = [&](const CohenCondition& p) {
      ++v.evaluations;
      return req.member(p);
    };
    auto left = [&] { return v.evaluations < budget; };

    if (req.open) {
      if (!left()) {
        v.kind = Genericity::unknown;
      } else if (!test(full)) {
        v.kind = Genericity::not_met_on_window;
      } else {
        v.kind = Genericity::met;
        Nat lo = 0;
        Nat hi = window;  // member(restrict_below(full, hi)) holds
        while (lo < hi && left()) {
          const Nat mid = lo + (hi - lo) / 2;
          if (test(restrict_below(full, mid))) {
            hi = mid;
          } else {
            lo = mid + 1;
          }
        }
        v.witness = restrict_below(full, hi);
      }
    } else {
      bool decided = false;
      for (Nat cut = 0; cut <= window && left(); ++cut) {
        auto p = restrict_below(full, cut);
        if (test(p)) {
          v.kind = Genericity::met;
          v.witness = std::move(p);
          decided = true;
          break;
        }
      }
      if (!decided) {
        const auto& cells = full.cells();
        const bool affordable = cells.size() < 63 && (Nat{1} << cells.size()) <= budget - std::min(budget, v.evaluations);
        if (affordable) {
          for (Nat mask = 0; mask < (Nat{1} << cells.size()) && !decided; ++mask) {
            std::vector<CohenCondition::Cell> sub;
            for (std::size_t c = 0; c < cells.size(); ++c) {
              if ((mask >> c) & 1U) sub.push_back(cells[c]);
            }
            auto p = CohenCondition::from_sorted_unchecked(std::move(sub));
            if (test(p)) {
              v.kind = Genericity::met;
              v.witness = std::move(p);
              decided = true;
            }
          }
          if (!decided) v.kind = Genericity::not_met_on_window;
        } else {
          v.kind = Genericity::unknown;
        }
      }
    }
    if (v.witness && (!req.member(*v.witness) || !v.witness->subset_of(full))) {
      fail(ErrorCode::invariant_violation, "genericity witness failed re-verification for " + req.name);
    }
    out.push_back(std::move(v));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Fusion: a tree of conditions indexed by words over sampled labels

/// Oracle standing in for a name of an increasing sequence of labels.
/// certify(p, s) decides "p forces s to be an initial segment of the name";
/// extend(p, s, floor) returns q <= p and s' properly extending s, certified
/// by q, whose first new entry exceeds floor when p leaves that entry
/// unbounded.
template <class Cond>
struct Labeler {
  std::function<std::optional<std::pair<Cond, IncSeq>>(const Cond&, const IncSeq&, Nat)> extend;
  std::function<bool(const Cond&, const IncSeq&)> certify;
};

/// Labeler over C(k) reading the sequence off real `coordinate` in unary
/// gaps: the real 1^{g0} 0 1^{g1} 0 ... names g0 < g0+1+g1 < ... A
/// condition certifies the blocks closed within its contiguous domain from
/// position 0. extend() fills undefined cells with 1 until the first new
/// entry exceeds floor, then with 0, and continues past every cell the
/// condition already defines on that coordinate, so the result's domain on
/// the coordinate is an initial segment and the next entry is unbounded below
/// it.
inline Labeler<CohenCondition> unary_gap_labeler(Nat coordinate = 0) {
  struct Decoded {
    std::vector<Nat> values;
    Nat gap = 0;
    Nat end = 0;  // first undefined position
  };
  auto decode = [coordinate](const CohenCondition& p) {
    Decoded d;
    for (;; ++d.end) {
      auto v = p.get({d.end, coordinate});
      if (!v) break;
      if (*v) {
        ++d.gap;
      } else {
        d.values.push_back(d.values.empty() ? d.gap : d.values.back() + 1 + d.gap);
        d.gap = 0;
      }
    }
    return d;
  };
  auto certifies = [decode](const CohenCondition& p, const IncSeq& s) {
    const auto d = decode(p);
    return d.values.size() >= s.size() && std::equal(s.begin(), s.end(), d.values.begin());
  };

  Labeler<CohenCondition> lab;
  lab.certify = certifies;
  lab.extend = [decode, certifies, coordinate](const CohenCondition& p, const IncSeq& s,
                                               Nat floor) -> std::optional<std::pair<CohenCondition, IncSeq>> {
    if (!certifies(p, s)) return std::nullopt;
    Nat horizon = 0;
    for (const auto& [key, bit] : p) {
      if (key.i == coordinate) horizon = std::max(horizon, key.n + 1);
    }
    CohenCondition q = p;
    std::vector<Nat> values;
    Nat gap = 0;
    bool big = false;
    for (Nat n = 0;; ++n) {
      const bool done = n >= horizon && values.size() > s.size() && big;
      if (done) break;
      auto bit = q.get({n, coordinate});
      if (!bit) {
        const Nat tentative = values.empty() ? gap : values.back() + 1 + gap;
        const bool raise = values.size() >= s.size() && !big && tentative <= floor;
        q.set({n, coordinate}, raise);
        bit = raise;
      }
      if (*bit) {
        ++gap;
      } else {
        values.push_back(values.empty() ? gap : values.back() + 1 + gap);
        if (values.size() > s.size() && values.back() > floor) big = true;
        gap = 0;
      }
    }
    return std::pair{std::move(q), IncSeq(std::move(values))};
  };
  return lab;
}

using IndexWord = std::vector<Nat>;

inline std::string index_key(const IndexWord& t) {
  std::string out;
  for (std::size_t k = 0; k < t.size(); ++k) out += (k ? "." : "") + std::to_string(t[k]);
  return out;
}

inline bool is_prefix(const IndexWord& t, const IndexWord& r) {
  return t.size() <= r.size() && std::equal(t.begin(), t.end(), r.begin());
}

template <class Cond>
struct FusionNode {
  Cond condition;
  IncSeq labels;
};

template <class Cond>
struct FusionTree {
  std::vector<Nat> label_sample;
  std::size_t depth = 0;
  std::map<IndexWord, FusionNode<Cond>> nodes;
};

/// Builds p_t, s_t for every word t over the label sample of length <= depth.
/// For each child t^a, in increasing order of a: the labeler extends s_t past
/// max(a, previous child's new entry) below p_t; the result is refined into
/// reqs[|t|+1]; a second labeler call then extends by at least one further
/// entry and leaves the next entry unbounded.
template <Poset P>
FusionTree<typename P::condition_type> fuse_generic_tree(const P& poset,
                                                         const std::vector<DenseReq<typename P::condition_type>>& reqs,
                                                         const Labeler<typename P::condition_type>& labeler,
                                                         std::vector<Nat> labels, std::size_t depth) {
  using Cond = typename P::condition_type;
  require(reqs.size() > depth, ErrorCode::precondition, "fuse_generic_tree needs more requirements than depth");
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());

  auto call_extend = [&](const Cond& p, const IncSeq& s, Nat floor, const IndexWord& where) {
    auto out = labeler.extend(p, s, floor);
    const std::string at = "node '" + index_key(where) + "'";
    if (!out) fail(ErrorCode::labeler_violation, at + ": labeler declined to extend");
    auto& [q, s2] = *out;
    if (!poset.valid(q) || !poset.leq(q, p)) fail(ErrorCode::labeler_violation, at + ": extension is not stronger");
    if (!(s.is_prefix_of(s2) && s2.size() > s.size())) {
      fail(ErrorCode::labeler_violation, at + ": label sequence not properly extended");
    }
    if (!labeler.certify(q, s2)) fail(ErrorCode::labeler_violation, at + ": extension is not certified");
    return std::move(*out);
  };

  FusionTree<Cond> tree;
  tree.label_sample = labels;
  tree.depth = depth;

  {
    const Cond p0 = checked_refine(poset, reqs[0], poset.root(), 0);
    auto [p, s] = call_extend(p0, IncSeq{}, 0, {});
    if (!reqs[0].member(p)) fail(ErrorCode::refine_failure, "root: stabilized condition left requirement 0");
    tree.nodes.emplace(IndexWord{}, FusionNode<Cond>{std::move(p), std::move(s)});
  }

  std::vector<IndexWord> level{IndexWord{}};
  for (std::size_t len = 0; len < depth; ++len) {
    std::vector<IndexWord> next;
    for (const auto& t : level) {
      const FusionNode<Cond> parent = tree.nodes.at(t);
      std::optional<Nat> previous;
      for (Nat a : labels) {
        IndexWord child = t;
        child.push_back(a);
        const Nat floor = previous ? std::max(a, *previous) : a;
        auto [q, s_plus] = call_extend(parent.condition, parent.labels, floor, child);
        const Nat picked = s_plus[parent.labels.size()];
        if (picked <= floor) {
          fail(ErrorCode::labeler_violation,
               "node '" + index_key(child) + "': next label not pushed above " + std::to_string(floor));
        }
        previous = picked;
        const Cond refined = checked_refine(poset, reqs[len + 1], q, len + 1);
        auto [p, s] = call_extend(refined, s_plus, s_plus.back(), child);
        if (!reqs[len + 1].member(p)) {
          fail(ErrorCode::refine_failure, "node '" + index_key(child) + "': stabilized condition left its requirement");
        }
        tree.nodes.emplace(child, FusionNode<Cond>{std::move(p), std::move(s)});
        next.push_back(std::move(child));
      }
    }
    level = std::move(next);
  }
  return tree;
}

struct FusionCheck {
  std::string name;
  std::size_t violations = 0;
  std::string first_detail;

  bool passed() const noexcept { return violations == 0; }
};

struct FusionReport {
  std::vector<FusionCheck> checks;

  bool ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed(); });
  }
};

/// Re-checks the five fusion invariants on a finished tree, independently of
/// the construction: requirement membership by level, certification of each
/// node's labels, monotonicity along extensions, incomparability of labels
/// on incomparable words, and unboundedness against every sampled label.
template <Poset P>
FusionReport check_fusion(const FusionTree<typename P::condition_type>& tree, const P& poset,
                          const std::vector<DenseReq<typename P::condition_type>>& reqs,
                          const Labeler<typename P::condition_type>& labeler) {
  FusionReport report;
  for (const char* name : {"membership", "certified", "monotone", "incomparable", "unbounded"}) {
    report.checks.push_back({name, 0, {}});
  }
  auto flag = [&](std::size_t which, const IndexWord& t, const std::string& what) {
    auto& c = report.checks[which];
    if (c.violations++ == 0) c.first_detail = "node '" + index_key(t) + "': " + what;
  };

  for (const auto& [t, node] : tree.nodes) {
    if (t.size() >= reqs.size() || !poset.valid(node.condition) || !reqs[t.size()].member(node.condition)) {
      flag(0, t, "condition is not in the requirement for its level");
    }
    if (!labeler.certify(node.condition, node.labels)) flag(1, t, "labels not certified by the condition");
    for (Nat threshold : tree.label_sample) {
      auto ext = labeler.extend(node.condition, node.labels, threshold);
      const bool good = ext && poset.leq(ext->first, node.condition) && labeler.certify(ext->first, ext->second) &&
                        node.labels.is_prefix_of(ext->second) && ext->second.size() > node.labels.size() &&
                        ext->second[node.labels.size()] > threshold;
      if (!good) flag(4, t, "no extension above label " + std::to_string(threshold));
    }
  }
  for (auto a = tree.nodes.begin(); a != tree.nodes.end(); ++a) {
    for (auto b = tree.nodes.begin(); b != tree.nodes.end(); ++b) {
      if (a == b) continue;
      const auto& [t, nt] = *a;
      const auto& [r, nr] = *b;
      if (is_prefix(t, r)) {
        if (!poset.leq(nr.condition, nt.condition) || !nt.labels.is_prefix_of(nr.labels) ||
            nt.labels.size() >= nr.labels.size()) {
          flag(2, r, "does not strengthen its ancestor '" + index_key(t) + "'");
        }
      } else if (!is_prefix(r, t) && t < r) {
        if (!incomparable(nt.labels, nr.labels)) flag(3, r, "labels comparable with '" + index_key(t) + "'");
      }
    }
  }
  return report;
}

/// Seeded list of open dense requirements over C(1): each defines a cell or
/// plants a short word past a random position on real 0.
inline std::vector<DenseReq<CohenCondition>> random_open_reqs(Nat seed, std::size_t count) {
  std::mt19937_64 rng(seed);
  std::vector<DenseReq<CohenCondition>> out;
  for (std::size_t k = 0; k < count; ++k) {
    const Nat pick = rng() % 3;
    if (pick == 0) {
      out.push_back(cell_defined(rng() % 40, 0));
    } else {
      BitWord w;
      const Nat len = 1 + rng() % 3;
      for (Nat b = 0; b < len; ++b) w.push_back((rng() & 1U) != 0);
      out.push_back(pattern_after(0, w, rng() % 30));
    }
  }
  return out;
}

}  // namespace oscforce
