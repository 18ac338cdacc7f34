// Independent reference implementations used by the tests. Nothing here calls
// into the library's index machinery or field tables.
#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <vector>

namespace oracle {

// --- field arithmetic from first principles ------------------------------

struct Gf {
  bool binary = false;
  std::uint32_t modulus = 0;  // p, or w for GF(2^w)
  std::uint32_t poly = 0;     // full reduction polynomial for GF(2^w)

  static Gf prime(std::uint32_t p) { return {false, p, 0}; }
  static Gf bin(std::uint32_t w, std::uint32_t poly) { return {true, w, poly}; }

  std::uint32_t order() const { return binary ? (1u << modulus) : modulus; }
  std::uint32_t add(std::uint32_t a, std::uint32_t b) const { return binary ? (a ^ b) : (a + b) % modulus; }
  std::uint32_t neg(std::uint32_t a) const { return binary ? a : (modulus - a) % modulus; }
  std::uint32_t sub(std::uint32_t a, std::uint32_t b) const { return add(a, neg(b)); }
  std::uint32_t mul(std::uint32_t a, std::uint32_t b) const {
    if (!binary) return static_cast<std::uint32_t>(std::uint64_t{a} * b % modulus);
    // schoolbook carry-less product, then long division by poly
    std::uint64_t prod = 0;
    for (std::uint32_t bit = 0; bit < modulus; ++bit) {
      if (b & (1u << bit)) prod ^= std::uint64_t{a} << bit;
    }
    for (int bit = 2 * static_cast<int>(modulus) - 2; bit >= static_cast<int>(modulus); --bit) {
      if (prod & (std::uint64_t{1} << bit)) prod ^= std::uint64_t{poly} << (bit - static_cast<int>(modulus));
    }
    return static_cast<std::uint32_t>(prod);
  }
  std::uint32_t pow(std::uint32_t a, std::uint64_t t) const {
    std::uint32_t out = 1;
    for (std::uint64_t i = 0; i < t; ++i) out = mul(out, a);
    return out;
  }
  // Brute-force inverse.
  std::uint32_t inv(std::uint32_t a) const {
    for (std::uint32_t x = 1; x < order(); ++x) {
      if (mul(a, x) == 1) return x;
    }
    return 0;
  }
};

/// sum_j points_j^t y_j for t = 0..r-1 all vanish.
inline bool in_dual_vandermonde(const Gf& f, const std::vector<std::uint32_t>& points,
                                const std::vector<std::uint32_t>& y, int r) {
  for (int t = 0; t < r; ++t) {
    std::uint32_t sum = 0;
    for (std::size_t j = 0; j < y.size(); ++j) sum = f.add(sum, f.mul(f.pow(points[j], static_cast<std::uint64_t>(t)), y[j]));
    if (sum != 0) return false;
  }
  return true;
}

/// Every codeword of the dual-Vandermonde code, by scanning all q^N vectors.
inline std::vector<std::vector<std::uint32_t>> all_codewords(const Gf& f, const std::vector<std::uint32_t>& points, int r) {
  const std::size_t N = points.size();
  const std::uint32_t q = f.order();
  std::vector<std::vector<std::uint32_t>> out;
  std::vector<std::uint32_t> y(N, 0);
  while (true) {
    if (in_dual_vandermonde(f, points, y, r)) out.push_back(y);
    std::size_t pos = 0;
    while (pos < N && ++y[pos] == q) y[pos++] = 0;
    if (pos == N) break;
  }
  return out;
}

// --- combinatorics --------------------------------------------------------

inline std::uint64_t choose(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  std::uint64_t out = 1;
  for (std::uint64_t j = 1; j <= k; ++j) out = out * (n - k + j) / j;
  return out;
}

/// h-subsets of [n] (1-based, ascending), ranked 1.. in colexicographic order.
inline std::map<std::vector<int>, std::uint64_t> colex_ranks(int n, int h) {
  std::vector<std::vector<int>> all;
  std::vector<int> cur;
  std::function<void(int)> rec = [&](int next) {
    if (static_cast<int>(cur.size()) == h) {
      all.push_back(cur);
      return;
    }
    for (int x = next; x <= n; ++x) {
      cur.push_back(x);
      rec(x + 1);
      cur.pop_back();
    }
  };
  rec(1);
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    return std::lexicographical_compare(a.rbegin(), a.rend(), b.rbegin(), b.rend());
  });
  std::map<std::vector<int>, std::uint64_t> out;
  for (std::size_t i = 0; i < all.size(); ++i) out[all[i]] = i + 1;
  return out;
}

/// g(i1, i2) = C(i2 - 1, 2) + i1 for i1 < i2.
inline std::uint64_t pair_rank(int i1, int i2) { return choose(static_cast<std::uint64_t>(i2 - 1), 2) + static_cast<std::uint64_t>(i1); }

// --- masking rules written directly over per-subset digit labels ---------
// `x` holds one digit per h-subset, x[g - 1] for subset rank g.

/// h = 2, s = 2, ternary digits.
inline int mask_parity_count(int n, int i, const std::vector<int>& x) {
  int f = 0;
  for (int j = 1; j < i; ++j) f += x[pair_rank(j, i) - 1] == 2;
  for (int j = i + 1; j <= n; ++j) f += x[pair_rank(i, j) - 1] == 1;
  return f % 2;
}

/// h = 2, general s, digits in [0, s^2 - 2] read as (x mod s, x div s).
inline int mask_two_digit(int n, int s, int i, const std::vector<int>& x) {
  int f = 0;
  for (int j = 1; j < i; ++j) f += x[pair_rank(j, i) - 1] / s;
  for (int j = i + 1; j <= n; ++j) f += x[pair_rank(i, j) - 1] % s;
  return f % s;
}

/// s = 2, general h, digits in [0, h]: 0 is the zero vector, u the unit vector e_u.
inline int mask_unit_vector(int n, int h, int i, const std::vector<int>& x) {
  const auto ranks = colex_ranks(n, h);
  int f = 0;
  for (const auto& [F, g] : ranks) {
    if (std::find(F.begin(), F.end(), i) == F.end()) continue;
    const int z = static_cast<int>(std::count_if(F.begin(), F.end(), [i](int e) { return e <= i; }));
    f += x[g - 1] == z;
  }
  return f % 2;
}

/// Digit vector of a two-digit label x -> (x mod s, x div s).
inline std::vector<std::uint8_t> two_digit_block(int x, int s) {
  return {static_cast<std::uint8_t>(x % s), static_cast<std::uint8_t>(x / s)};
}

/// Unit-vector label u -> e_u (u = 0 gives the zero vector), length h.
inline std::vector<std::uint8_t> unit_block(int u, int h) {
  std::vector<std::uint8_t> b(static_cast<std::size_t>(h), 0);
  if (u > 0) b[static_cast<std::size_t>(u - 1)] = 1;
  return b;
}

// --- coefficient matrices of the small fixed-subset codes ------------------
// Coefficients are element values under the canonical assignment: masked
// nodes take s consecutive values each, in node order, then unmasked nodes one each.

/// h = 2: rows a = 0..s^2-2 with digits a = a1 + s*a2; node 1 uses lambda_{1,a1},
/// node 2 lambda_{2,a2}, node i > 2 a constant.
inline std::vector<std::vector<std::uint32_t>> two_failure_matrix(int n, int s) {
  std::vector<std::vector<std::uint32_t>> m;
  for (int a = 0; a <= s * s - 2; ++a) {
    const int a1 = a % s;
    const int a2 = a / s;
    std::vector<std::uint32_t> row(static_cast<std::size_t>(n));
    row[0] = static_cast<std::uint32_t>(a1);
    row[1] = static_cast<std::uint32_t>(s + a2);
    for (int i = 3; i <= n; ++i) row[static_cast<std::size_t>(i - 1)] = static_cast<std::uint32_t>(2 * s + i - 3);
    m.push_back(row);
  }
  return m;
}

/// s = 2: rows a = 0..h; node i <= h uses lambda_{i,1} exactly in row a = i.
inline std::vector<std::vector<std::uint32_t>> single_helper_excess_matrix(int n, int h) {
  std::vector<std::vector<std::uint32_t>> m;
  for (int a = 0; a <= h; ++a) {
    std::vector<std::uint32_t> row(static_cast<std::size_t>(n));
    for (int i = 1; i <= h; ++i) row[static_cast<std::size_t>(i - 1)] = static_cast<std::uint32_t>(2 * (i - 1) + (a == i ? 1 : 0));
    for (int i = h + 1; i <= n; ++i) row[static_cast<std::size_t>(i - 1)] = static_cast<std::uint32_t>(2 * h + i - h - 1);
    m.push_back(row);
  }
  return m;
}

/// Cut-set values as exact fractions (num, den), unreduced.
inline std::pair<std::uint64_t, std::uint64_t> coop_bound(int h, int d, int k, std::uint64_t l) {
  return {static_cast<std::uint64_t>(h) * static_cast<std::uint64_t>(h + d - 1) * l, static_cast<std::uint64_t>(h + d - k)};
}
inline std::pair<std::uint64_t, std::uint64_t> central_bound(int h, int d, int k, std::uint64_t l) {
  return {static_cast<std::uint64_t>(h) * static_cast<std::uint64_t>(d) * l, static_cast<std::uint64_t>(h + d - k)};
}

}  // namespace oracle
