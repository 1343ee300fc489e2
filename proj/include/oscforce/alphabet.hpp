#pragma once

// Countable ordered alphabets over which tree nodes are built. Each alphabet
// names a value type with a strict total order, a strictly increasing cofinal
// enumeration, a bijective integer coding, and a dovetailed enumeration of
// the values strictly above a given one (the search order used by trees).

#include <compare>
#include <concepts>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "oscforce/seqspace.hpp"

namespace oscforce {

template <class A>
concept OrderedAlphabet = requires(const typename A::value_type& v, const std::optional<typename A::value_type>& floor,
                                   Nat n) {
  typename A::value_type;
  requires std::totally_ordered<typename A::value_type>;
  { A::name() } -> std::convertible_to<std::string_view>;
  { A::cofinal(n) } -> std::same_as<typename A::value_type>;
  { A::encode(v) } -> std::same_as<Nat>;
  { A::decode(n) } -> std::same_as<typename A::value_type>;
  { A::above(floor, n) } -> std::same_as<typename A::value_type>;
  { A::progression(floor, n, n, n) } -> std::same_as<typename A::value_type>;
  { A::progression_index(floor, n, n, v) } -> std::same_as<std::optional<Nat>>;
  { A::to_string(v) } -> std::convertible_to<std::string>;
};

/// The naturals in their usual order.
struct Omega {
  using value_type = Nat;

  static constexpr std::string_view name() { return "omega"; }
  static value_type cofinal(Nat k) { return k; }
  static Nat encode(value_type v) { return v; }
  static value_type decode(Nat code) { return code; }

  /// j-th value strictly above floor, in increasing order.
  static value_type above(const std::optional<value_type>& floor, Nat j) {
    return floor ? checked_add(checked_add(*floor, 1), j) : j;
  }

  /// k-th term of an arithmetic progression starting `offset` past the
  /// successor of `after`.
  static value_type progression(const std::optional<value_type>& after, Nat offset, Nat step, Nat k) {
    const Nat base = after ? checked_add(*after, 1) : 0;
    return checked_add(checked_add(base, offset), checked_mul(step, k));
  }

  /// k with progression(after, offset, step, k) == v, if any.
  static std::optional<Nat> progression_index(const std::optional<value_type>& after, Nat offset, Nat step,
                                              value_type v) {
    const Nat first = progression(after, offset, step, 0);
    if (v < first || (v - first) % step != 0) return std::nullopt;
    return (v - first) / step;
  }

  static std::string to_string(value_type v) { return std::to_string(v); }
};

/// Element of omega x omega under the lexicographic order (order type omega^2).
struct LexPair {
  Nat major = 0;
  Nat minor = 0;

  friend auto operator<=>(const LexPair&, const LexPair&) = default;
  friend bool operator==(const LexPair&, const LexPair&) = default;
};

namespace detail {

inline Nat cantor_pair(Nat a, Nat b) {
  const Nat s = checked_add(a, b);
  const Nat tri = (s % 2 == 0) ? checked_mul(s / 2, checked_add(s, 1)) : checked_mul(s, checked_add(s, 1) / 2);
  return checked_add(tri, b);
}

/// s(s+1)/2 for s <= 2^32, which fits in 64 bits.
inline Nat triangle(Nat s) { return (s % 2 == 0) ? (s / 2) * (s + 1) : s * ((s + 1) / 2); }

inline std::pair<Nat, Nat> cantor_unpair(Nat code) {
  // largest s with s(s+1)/2 <= code
  Nat lo = 0;
  Nat hi = Nat{1} << 32;
  while (lo < hi) {
    const Nat mid = lo + (hi - lo + 1) / 2;
    if (triangle(mid) <= code) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  const Nat b = code - triangle(lo);
  return {lo - b, b};
}

}  // namespace detail

/// omega x omega, lexicographic. Stands in for a limit ordinal of countable
/// cofinality larger than omega: (k, 0) is cofinal.
struct LexOmega2 {
  using value_type = LexPair;

  static constexpr std::string_view name() { return "lex2"; }
  static value_type cofinal(Nat k) { return {k, 0}; }
  static Nat encode(value_type v) { return detail::cantor_pair(v.major, v.minor); }
  static value_type decode(Nat code) {
    auto [a, b] = detail::cantor_unpair(code);
    return {a, b};
  }

  /// Dovetails the column of `floor` (same major, larger minor) with every
  /// later column, so each value above floor appears at a finite index.
  static value_type above(const std::optional<value_type>& floor, Nat j) {
    if (!floor) return decode(j);
    auto [p, q] = detail::cantor_unpair(j);
    if (p == 0) return {floor->major, checked_add(checked_add(floor->minor, 1), q)};
    return {checked_add(floor->major, p), q};
  }

  static value_type progression(const std::optional<value_type>& after, Nat offset, Nat step, Nat k) {
    const Nat base = after ? checked_add(after->major, 1) : 0;
    return {checked_add(checked_add(base, offset), checked_mul(step, k)), offset};
  }

  static std::optional<Nat> progression_index(const std::optional<value_type>& after, Nat offset, Nat step,
                                              value_type v) {
    const value_type first = progression(after, offset, step, 0);
    if (v.minor != offset || v.major < first.major || (v.major - first.major) % step != 0) return std::nullopt;
    return (v.major - first.major) / step;
  }

  static std::string to_string(value_type v) {
    return "(" + std::to_string(v.major) + "," + std::to_string(v.minor) + ")";
  }
};

static_assert(OrderedAlphabet<Omega>);
static_assert(OrderedAlphabet<LexOmega2>);

}  // namespace oscforce
