#pragma once

// Finite and lazily produced strictly increasing sequences, dominance
// comparisons over observed windows, and the dyadic block partition of the
// naturals used to split one binary real into infinitely many.

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "oscforce/error.hpp"

namespace oscforce {

using Nat = std::uint64_t;

inline Nat checked_add(Nat a, Nat b) {
  Nat out = 0;
  if (__builtin_add_overflow(a, b, &out)) fail(ErrorCode::overflow, "natural addition overflows 64 bits");
  return out;
}

inline Nat checked_mul(Nat a, Nat b) {
  Nat out = 0;
  if (__builtin_mul_overflow(a, b, &out)) fail(ErrorCode::overflow, "natural multiplication overflows 64 bits");
  return out;
}

// ---------------------------------------------------------------------------
// Increasing sequences

struct IncVerdict {
  bool valid = true;
  /// Index k such that entries[k-1] >= entries[k].
  std::optional<std::size_t> first_violation;
};

template <class V>
IncVerdict validate_inc(std::span<const V> entries) {
  for (std::size_t k = 1; k < entries.size(); ++k) {
    if (!(entries[k - 1] < entries[k])) return {false, k};
  }
  return {};
}

template <class V>
IncVerdict validate_inc(const std::vector<V>& entries) {
  return validate_inc(std::span<const V>(entries));
}

/// A strictly increasing finite sequence over a totally ordered value type.
template <class V>
class BasicIncSeq {
 public:
  using value_type = V;

  BasicIncSeq() = default;
  explicit BasicIncSeq(std::vector<V> entries) : entries_(std::move(entries)) {
    auto verdict = validate_inc(entries_);
    if (!verdict.valid) {
      fail(ErrorCode::precondition,
           "sequence is not strictly increasing at index " + std::to_string(*verdict.first_violation));
    }
  }
  BasicIncSeq(std::initializer_list<V> entries) : BasicIncSeq(std::vector<V>(entries)) {}

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const V& operator[](std::size_t k) const { return entries_[k]; }
  const V& back() const { return entries_.back(); }
  const std::vector<V>& entries() const noexcept { return entries_; }
  std::span<const V> view() const noexcept { return entries_; }
  auto begin() const noexcept { return entries_.begin(); }
  auto end() const noexcept { return entries_.end(); }

  /// Appends v; throws unless v exceeds the current last entry.
  void push_back(const V& v) {
    if (!entries_.empty() && !(entries_.back() < v)) {
      fail(ErrorCode::precondition, "appended value does not exceed the last entry");
    }
    entries_.push_back(v);
  }

  BasicIncSeq extended(const V& v) const {
    BasicIncSeq out = *this;
    out.push_back(v);
    return out;
  }

  BasicIncSeq prefix(std::size_t n) const {
    BasicIncSeq out;
    out.entries_.assign(entries_.begin(), entries_.begin() + static_cast<std::ptrdiff_t>(std::min(n, size())));
    return out;
  }

  bool is_prefix_of(const BasicIncSeq& other) const {
    return size() <= other.size() && std::equal(entries_.begin(), entries_.end(), other.entries_.begin());
  }

  friend bool operator==(const BasicIncSeq&, const BasicIncSeq&) = default;
  friend auto operator<=>(const BasicIncSeq&, const BasicIncSeq&) = default;

 private:
  std::vector<V> entries_;
};

using IncSeq = BasicIncSeq<Nat>;

/// Neither is an initial segment of the other.
template <class V>
bool incomparable(const BasicIncSeq<V>& a, const BasicIncSeq<V>& b) {
  return !a.is_prefix_of(b) && !b.is_prefix_of(a);
}

/// Lazily produced infinite increasing sequence. The producer receives the
/// prefix computed so far and returns the next entry. Values are memoized so
/// every call observes the same sequence; access is serialized.
class SeqStream {
 public:
  using Producer = std::function<Nat(const std::vector<Nat>& so_far)>;

  explicit SeqStream(Producer next) : next_(std::move(next)), cache_(std::make_shared<Cache>()) {}

  IncSeq prefix(std::size_t n) const {
    std::lock_guard lock(cache_->mutex);
    auto& values = cache_->values;
    while (values.size() < n) {
      Nat v = next_(values);
      if (!values.empty() && v <= values.back()) {
        fail(ErrorCode::invariant_violation, "stream producer emitted a non-increasing value");
      }
      values.push_back(v);
    }
    return IncSeq(std::vector<Nat>(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(n)));
  }

  /// The stream k -> a + step*k.
  static SeqStream arithmetic(Nat start, Nat step) {
    if (step == 0) fail(ErrorCode::precondition, "arithmetic stream needs a positive step");
    return SeqStream([start, step](const std::vector<Nat>& so_far) {
      return checked_add(start, checked_mul(step, so_far.size()));
    });
  }

 private:
  struct Cache {
    std::mutex mutex;
    std::vector<Nat> values;
  };
  Producer next_;
  std::shared_ptr<Cache> cache_;
};

// ---------------------------------------------------------------------------
// Dominance over a common window

struct DominanceVerdict {
  bool holds = true;
  std::optional<std::size_t> failure_index;
};

/// f[k] >= g[k] for every k in the common window.
inline DominanceVerdict dominates_everywhere(const IncSeq& f, const IncSeq& g) {
  const std::size_t window = std::min(f.size(), g.size());
  for (std::size_t k = 0; k < window; ++k) {
    if (f[k] < g[k]) return {false, k};
  }
  return {};
}

/// Window-relative certificate for eventual dominance. `from` is the least k
/// with f[j] >= g[j] for all k <= j < window; absent when the last observed
/// position already fails. Says nothing about entries past the window.
struct EventualVerdict {
  std::optional<std::size_t> from;
  std::size_t window = 0;

  bool holds_on_window() const noexcept { return from.has_value(); }
};

inline EventualVerdict eventually_dominates(const IncSeq& f, const IncSeq& g) {
  const std::size_t window = std::min(f.size(), g.size());
  std::size_t k = window;
  while (k > 0 && f[k - 1] >= g[k - 1]) --k;
  if (window > 0 && k == window) return {std::nullopt, window};
  return {k, window};
}

// ---------------------------------------------------------------------------
// Binary words

class BitWord {
 public:
  BitWord() = default;
  explicit BitWord(std::string_view bits) : bits_(bits) {
    for (char c : bits_) {
      if (c != '0' && c != '1') fail(ErrorCode::parse, "bit word may contain only '0' and '1'");
    }
  }
  static BitWord zeros(std::size_t n) { return BitWord(std::string(n, '0')); }
  static BitWord from_bits(const std::vector<bool>& bits) {
    BitWord w;
    w.bits_.reserve(bits.size());
    for (bool b : bits) w.bits_.push_back(b ? '1' : '0');
    return w;
  }

  std::size_t size() const noexcept { return bits_.size(); }
  bool empty() const noexcept { return bits_.empty(); }
  bool operator[](std::size_t k) const { return bits_[k] == '1'; }
  void push_back(bool b) { bits_.push_back(b ? '1' : '0'); }
  const std::string& str() const noexcept { return bits_; }

  BitWord prefix(std::size_t n) const { return BitWord(std::string_view(bits_).substr(0, n)); }
  BitWord appended(bool b) const {
    BitWord out = *this;
    out.push_back(b);
    return out;
  }
  bool is_prefix_of(const BitWord& other) const {
    return size() <= other.size() && other.bits_.compare(0, size(), bits_) == 0;
  }

  friend bool operator==(const BitWord&, const BitWord&) = default;
  friend auto operator<=>(const BitWord&, const BitWord&) = default;

 private:
  std::string bits_;
};

/// All words of a fixed length, lexicographic.
inline std::vector<BitWord> all_words(std::size_t length) {
  if (length >= 63) fail(ErrorCode::precondition, "word length too large to enumerate");
  std::vector<BitWord> out;
  out.reserve(std::size_t{1} << length);
  for (Nat code = 0; code < (Nat{1} << length); ++code) {
    BitWord w;
    for (std::size_t b = length; b-- > 0;) w.push_back(((code >> b) & 1U) != 0);
    out.push_back(std::move(w));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Block partition: A_i = { 2^i (2k+1) - 1 : k in N }, i.e. n lies in A_i iff
// the 2-adic valuation of n+1 is i. A_{i,j} is the image of A_j under the
// increasing enumeration of A_i.

/// The k-th element of A_i.
inline Nat block_index(Nat i, Nat k) {
  if (i >= 64) fail(ErrorCode::overflow, "block index 2^i overflows 64 bits");
  const Nat odd = checked_add(checked_mul(2, k), 1);
  return checked_mul(Nat{1} << i, odd) - 1;
}

/// Inverse of block_index: the unique (i, k) with block_index(i, k) == n.
inline std::pair<Nat, Nat> block_locate(Nat n) {
  if (n == std::numeric_limits<Nat>::max()) fail(ErrorCode::overflow, "position has no successor");
  const Nat succ = n + 1;
  const auto i = static_cast<Nat>(std::countr_zero(succ));
  return {i, ((succ >> i) - 1) / 2};
}

/// d restricted to A_i, transported to an initial segment of N.
inline BitWord block_split(const BitWord& d, Nat i) {
  BitWord out;
  if (i >= 64) return out;
  for (Nat k = 0;; ++k) {
    const Nat pos = block_index(i, k);
    if (pos >= d.size()) break;
    out.push_back(d[pos]);
  }
  return out;
}

/// d restricted to A_{i,j}.
inline BitWord block_split2(const BitWord& d, Nat i, Nat j) { return block_split(block_split(d, i), j); }

/// Reassembles a word of length `len` from its parts; parts[i] supplies the
/// bits at the positions of A_i in order.
inline BitWord block_merge(const std::map<Nat, BitWord>& parts, std::size_t len) {
  BitWord out;
  for (Nat n = 0; n < len; ++n) {
    auto [i, k] = block_locate(n);
    auto it = parts.find(i);
    if (it == parts.end() || k >= it->second.size()) {
      fail(ErrorCode::missing_bit, "no bit supplied for position " + std::to_string(n) + " (block " +
                                       std::to_string(i) + ", slot " + std::to_string(k) + ")");
    }
    out.push_back(it->second[k]);
  }
  return out;
}

/// Every nonempty block of a word of the given length.
inline std::map<Nat, BitWord> block_split_all(const BitWord& d) {
  std::map<Nat, BitWord> parts;
  for (Nat i = 0; i < 64 && (Nat{1} << i) - 1 < d.size(); ++i) parts.emplace(i, block_split(d, i));
  return parts;
}

}  // namespace oscforce
