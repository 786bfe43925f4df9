#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <iterator>
#include <string>
#include <unordered_set>
#include <vector>

#include "minimaxq/core.hpp"

namespace minimaxq {

using Word = std::vector<std::uint8_t>;

struct HammingPacking {
  int d = 0;
  std::vector<Word> words;
  // Every pair of distinct words is at Hamming distance > min_distance.
  double min_distance = 0.0;

  std::size_t size() const { return words.size(); }
};

struct SparsePacking {
  HammingPacking packing;
  int s = 0;

  // omega_j / sqrt(s); unit norm when the word has weight s. Computed on
  // demand since packings can hold ~10^6 words.
  Vector vector(std::size_t j) const {
    const auto& w = packing.words.at(j);
    Vector v(static_cast<Eigen::Index>(w.size()));
    const double scale = 1.0 / std::sqrt(static_cast<double>(s));
    for (std::size_t i = 0; i < w.size(); ++i) v[static_cast<Eigen::Index>(i)] = w[i] * scale;
    return v;
  }
};

inline int hamming_distance(const Word& a, const Word& b) {
  int dist = 0;
  for (std::size_t i = 0; i < a.size(); ++i) dist += (a[i] != b[i]);
  return dist;
}

inline std::string to_string(const Word& w) {
  std::string out(w.size(), '0');
  for (std::size_t i = 0; i < w.size(); ++i)
    if (w[i]) out[i] = '1';
  return out;
}

// log M guaranteed for the sparse greedy packing; may be negative (vacuous).
inline double gv_sparse_log_bound(int d, int s) {
  return 0.75 * s * std::log(static_cast<double>(d) / (4.0 * s));
}

namespace detail {

// Supports are sorted position lists; position 0 is the most significant
// character of the 0/1 string, so lexicographic order on strings is numeric
// order on the binary value.

// Adds one unit at position p with carry toward position 0. False on overflow.
inline bool add_at(std::vector<int>& S, int p) {
  while (p >= 0) {
    auto it = std::lower_bound(S.begin(), S.end(), p);
    if (it == S.end() || *it != p) {
      S.insert(it, p);
      return true;
    }
    S.erase(it);
    --p;
  }
  return false;
}

// Next support in lexicographic order among words of weight <= s.
inline bool next_support(std::vector<int>& S, int d, int s) {
  if (!add_at(S, d - 1)) return false;
  while (static_cast<int>(S.size()) > s)
    if (!add_at(S, S.back())) return false;
  return true;
}

// Set keys: a bit mask when d <= 64, otherwise packed positions.
inline std::uint64_t encode_mask(const std::vector<int>& S) {
  std::uint64_t m = 0;
  for (int p : S) m |= std::uint64_t{1} << p;
  return m;
}

inline std::string encode(const std::vector<int>& S) {
  std::string key;
  key.reserve(S.size() * 2);
  for (int p : S) {
    key.push_back(static_cast<char>(p & 0xff));
    key.push_back(static_cast<char>((p >> 8) & 0xff));
  }
  return key;
}

// Visits every support obtained by flipping between 1 and L positions of S
// that keeps weight <= s.
template <class F>
void for_each_flip(const std::vector<int>& S, int d, int s, int L, F&& visit) {
  std::vector<int> flips;
  auto apply = [&]() {
    std::vector<int> out;
    std::set_symmetric_difference(S.begin(), S.end(), flips.begin(), flips.end(),
                                  std::back_inserter(out));
    if (static_cast<int>(out.size()) <= s) visit(out);
  };
  auto rec = [&](auto&& self, int start) -> void {
    for (int p = start; p < d; ++p) {
      flips.push_back(p);
      apply();
      if (static_cast<int>(flips.size()) < L) self(self, p + 1);
      flips.pop_back();
    }
  };
  if (L > 0) rec(rec, 0);
}

// True when the word with support A comes before the one with support B.
inline bool precedes(const std::vector<int>& A, const std::vector<int>& B) {
  std::size_t i = 0, j = 0;
  while (i < A.size() && j < B.size()) {
    if (A[i] == B[j]) {
      ++i;
      ++j;
    } else {
      return A[i] > B[j];  // B owns the most significant differing position
    }
  }
  return i == A.size() && j < B.size();
}

inline Word support_to_word(const std::vector<int>& S, int d) {
  Word w(static_cast<std::size_t>(d), 0);
  for (int p : S) w[static_cast<std::size_t>(p)] = 1;
  return w;
}

template <class Key, class Encode>
void sparse_greedy(int d, int s, std::size_t max_words, Encode encode_fn, HammingPacking& out) {
  const int L = s / 4;  // forbidden radius: distance <= floor(s/4)
  std::unordered_set<Key> forbidden;
  std::vector<int> S;  // zero word first
  do {
    if (L > 0 && forbidden.count(encode_fn(S))) continue;
    out.words.push_back(support_to_word(S, d));
    if (max_words && out.words.size() >= max_words) break;
    for_each_flip(S, d, s, L, [&](const std::vector<int>& T) {
      // Only words after S in the enumeration can still be chosen.
      if (!precedes(T, S)) forbidden.insert(encode_fn(T));
    });
  } while (next_support(S, d, s));
}

// Bit-mask variant of sparse_greedy for d <= 64 (bit p is position p).
inline void sparse_greedy_mask(int d, int s, std::size_t max_words, HammingPacking& out) {
  const int L = s / 4;
  std::unordered_set<std::uint64_t> forbidden;
  std::vector<int> S;
  do {
    const std::uint64_t mask = encode_mask(S);
    if (L > 0 && forbidden.count(mask)) continue;
    out.words.push_back(support_to_word(S, d));
    if (max_words && out.words.size() >= max_words) break;
    // T = mask ^ F comes after mask iff the lowest flipped position is off in mask.
    auto rec = [&](auto&& self, int start, int depth, std::uint64_t F) -> void {
      for (int p = start; p < d; ++p) {
        const std::uint64_t G = F | (std::uint64_t{1} << p);
        const std::uint64_t T = mask ^ G;
        if (!(mask >> std::countr_zero(G) & 1U) && std::popcount(T) <= s) forbidden.insert(T);
        if (depth + 1 < L) self(self, p + 1, depth + 1, G);
      }
    };
    if (L > 0) rec(rec, 0, 0, 0);
  } while (next_support(S, d, s));
}

}  // namespace detail

// Greedy packing of {omega : |omega|_0 <= s} with pairwise distance > s/4,
// taking the lexicographically smallest admissible word at each step.
// max_words > 0 stops early once that many words are collected.
inline SparsePacking gv_sparse_packing(int d, int s, std::size_t max_words = 0) {
  require(d >= 1, "gv_sparse_packing: d must be >= 1");
  require(s >= 1 && s <= d, "gv_sparse_packing: s must lie in [1, d]");
  SparsePacking out;
  out.s = s;
  out.packing.d = d;
  out.packing.min_distance = s / 4.0;
  if (d <= 64)
    detail::sparse_greedy_mask(d, s, max_words, out.packing);
  else
    detail::sparse_greedy<std::string>(d, s, max_words, detail::encode, out.packing);
  return out;
}

// Greedy packing of the full cube {0,1}^m with pairwise distance > m/4.
// Exhaustive for m <= 26; beyond that the greedy stops at max_words
// (default ceil(e^{m/8})) and requires m <= 64.
inline HammingPacking gv_cube_packing(int m, std::size_t max_words = 0) {
  require(m >= 1, "gv_cube_packing: m must be >= 1");
  const int L = m / 4;
  HammingPacking out;
  out.d = m;
  out.min_distance = m / 4.0;

  auto to_word = [m](std::uint64_t x) {
    Word w(static_cast<std::size_t>(m), 0);
    for (int i = 0; i < m; ++i) w[static_cast<std::size_t>(i)] = (x >> (m - 1 - i)) & 1U;
    return w;
  };

  if (m <= 26) {
    const std::uint64_t total = std::uint64_t{1} << m;
    std::vector<bool> removed(total, false);
    for (std::uint64_t x = 0; x < total; ++x) {
      if (removed[x]) continue;
      out.words.push_back(to_word(x));
      if (max_words && out.words.size() >= max_words) break;
      auto rec = [&](auto&& self, int start, int depth, std::uint64_t y) -> void {
        for (int b = start; b < m; ++b) {
          std::uint64_t z = y ^ (std::uint64_t{1} << b);
          if (z > x) removed[z] = true;
          if (depth + 1 < L) self(self, b + 1, depth + 1, z);
        }
      };
      if (L > 0) rec(rec, 0, 0, x);
    }
    return out;
  }

  if (m > 64) throw CapacityError("gv_cube_packing: m > 64 is not supported");
  if (!max_words) max_words = static_cast<std::size_t>(std::ceil(std::exp(m / 8.0)));
  std::vector<std::uint64_t> chosen;
  const std::uint64_t last = (m == 64) ? ~std::uint64_t{0} : (std::uint64_t{1} << m) - 1;
  for (std::uint64_t x = 0;; ++x) {
    bool ok = true;
    for (auto c : chosen)
      if (std::popcount(c ^ x) <= L) {
        ok = false;
        break;
      }
    if (ok) {
      chosen.push_back(x);
      out.words.push_back(to_word(x));
      if (out.words.size() >= max_words) break;
    }
    if (x == last) break;
  }
  return out;
}

}  // namespace minimaxq
