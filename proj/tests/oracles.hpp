#pragma once

// Reference evaluators for the tests. Each recomputes a definition directly,
// without calling the library routine it is compared against.

#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

using u64 = std::uint64_t;

/// n in O(x,y,z) iff z(n-1) <= min(x(n-1), y(n-1)) and max(x(n), y(n)) < z(n).
inline std::vector<u64> osc_points(const std::vector<u64>& x, const std::vector<u64>& y, const std::vector<u64>& z,
                                   u64 upto) {
  std::vector<u64> out;
  for (u64 n = 1; n <= upto; ++n) {
    const u64 lo = x[n - 1] < y[n - 1] ? x[n - 1] : y[n - 1];
    const u64 hi = x[n] > y[n] ? x[n] : y[n];
    if (z[n - 1] <= lo && hi < z[n]) out.push_back(n);
  }
  return out;
}

/// Bit k is '1' iff y(n_k) < x(n_k).
inline std::string color_bits(const std::vector<u64>& x, const std::vector<u64>& y, const std::vector<u64>& z) {
  std::size_t window = x.size();
  if (y.size() < window) window = y.size();
  if (z.size() < window) window = z.size();
  std::string bits;
  if (window == 0) return bits;
  for (u64 n : osc_points(x, y, z, window - 1)) bits.push_back(y[n] < x[n] ? '1' : '0');
  return bits;
}

/// (i, k) with n = 2^i (2k+1) - 1, by repeated halving.
inline std::pair<u64, u64> locate(u64 n) {
  u64 m = n + 1;
  u64 i = 0;
  while (m % 2 == 0) {
    m /= 2;
    ++i;
  }
  return {i, (m - 1) / 2};
}

/// Bits of d at the positions whose block is i, in order.
inline std::string split(const std::string& d, u64 i) {
  std::string out;
  for (u64 p = 0; p < d.size(); ++p) {
    if (locate(p).first == i) out.push_back(d[p]);
  }
  return out;
}

inline std::vector<u64> random_increasing(std::mt19937_64& rng, std::size_t len, u64 max_gap) {
  std::vector<u64> out;
  u64 v = rng() % (max_gap + 1);
  for (std::size_t k = 0; k < len; ++k) {
    out.push_back(v);
    v += 1 + rng() % max_gap;
  }
  return out;
}

inline std::string random_bits(std::mt19937_64& rng, std::size_t len) {
  std::string out;
  for (std::size_t k = 0; k < len; ++k) out.push_back((rng() & 1U) ? '1' : '0');
  return out;
}

/// All binary strings of length <= max_len, shortest first.
inline std::vector<std::string> strings_upto(std::size_t max_len) {
  std::vector<std::string> out{""};
  std::vector<std::string> level{""};
  for (std::size_t len = 1; len <= max_len; ++len) {
    std::vector<std::string> next;
    for (const auto& s : level) {
      next.push_back(s + "0");
      next.push_back(s + "1");
    }
    out.insert(out.end(), next.begin(), next.end());
    level = next;
  }
  return out;
}

/// Node sets S of strings of length <= m with: "" in S, S closed under
/// prefixes, every member a prefix of some member of length exactly m.
/// Found by filtering all subsets.
inline std::vector<std::set<std::string>> perfect_conditions(std::size_t m) {
  const auto universe = strings_upto(m);
  std::vector<std::set<std::string>> out;
  for (u64 mask = 0; mask < (u64{1} << universe.size()); ++mask) {
    std::set<std::string> s;
    for (std::size_t b = 0; b < universe.size(); ++b) {
      if ((mask >> b) & 1U) s.insert(universe[b]);
    }
    if (!s.count("")) continue;
    bool ok = true;
    for (const auto& w : s) {
      if (!w.empty() && !s.count(w.substr(0, w.size() - 1))) ok = false;
      bool reaches = false;
      for (const auto& v : s) {
        if (v.size() == m && v.compare(0, w.size(), w) == 0) reaches = true;
      }
      if (!reaches) ok = false;
    }
    if (ok) out.push_back(std::move(s));
  }
  return out;
}

/// Unary-gap decoding of a fully known 0/1 string: 1^{g0} 0 1^{g1} 0 ...
/// yields g0, g0+1+g1, ...; a trailing run of 1s is dropped.
inline std::vector<u64> unary_decode(const std::string& bits) {
  std::vector<u64> out;
  u64 gap = 0;
  for (char c : bits) {
    if (c == '1') {
      ++gap;
    } else {
      out.push_back(out.empty() ? gap : out.back() + 1 + gap);
      gap = 0;
    }
  }
  return out;
}

}  // namespace oracle
