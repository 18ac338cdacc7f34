#include "coopmds/grs.hpp"

#include <algorithm>
#include <string>

#include "coopmds/error.hpp"

namespace coopmds {
namespace {

void require_distinct(std::span<const FieldElement> points) {
  std::vector<FieldElement> sorted(points.begin(), points.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    fail(ErrorKind::invalid_argument, "Vandermonde points must be pairwise distinct");
  }
}

// Gaussian elimination on a dense q x q system stored row-major; rhs is
// overwritten with the solution.
void eliminate(const Field& f, std::vector<FieldElement>& m, std::span<FieldElement> rhs) {
  const std::size_t q = rhs.size();
  for (std::size_t col = 0; col < q; ++col) {
    std::size_t pivot = col;
    while (pivot < q && m[pivot * q + col].is_zero()) ++pivot;
    if (pivot == q) fail(ErrorKind::invalid_argument, "singular Vandermonde system");
    if (pivot != col) {
      for (std::size_t j = 0; j < q; ++j) std::swap(m[pivot * q + j], m[col * q + j]);
      std::swap(rhs[pivot], rhs[col]);
    }
    const FieldElement scale = f.inv(m[col * q + col]);
    for (std::size_t j = col; j < q; ++j) m[col * q + j] = f.mul(m[col * q + j], scale);
    rhs[col] = f.mul(rhs[col], scale);
    for (std::size_t row = 0; row < q; ++row) {
      if (row == col) continue;
      const FieldElement factor = m[row * q + col];
      if (factor.is_zero()) continue;
      for (std::size_t j = col; j < q; ++j) {
        m[row * q + j] = f.sub(m[row * q + j], f.mul(factor, m[col * q + j]));
      }
      rhs[row] = f.sub(rhs[row], f.mul(factor, rhs[col]));
    }
  }
}

}  // namespace

std::vector<FieldElement> solve_vandermonde(const Field& field, std::span<const FieldElement> points,
                                            std::span<const FieldElement> rhs) {
  const std::size_t q = points.size();
  if (rhs.size() != q) fail(ErrorKind::invalid_argument, "rhs length must equal the number of points");
  require_distinct(points);
  std::vector<FieldElement> m(q * q);
  for (std::size_t j = 0; j < q; ++j) {
    FieldElement power = field.one();
    for (std::size_t t = 0; t < q; ++t) {
      m[t * q + j] = power;
      power = field.mul(power, points[j]);
    }
  }
  std::vector<FieldElement> y(rhs.begin(), rhs.end());
  eliminate(field, m, y);
  return y;
}

void grs_fill_unknowns(const Field& field, std::span<const FieldElement> points, std::span<FieldElement> word,
                       std::span<const std::size_t> unknown) {
  const std::size_t n = points.size();
  const std::size_t r = unknown.size();
  if (r == 0) return;
  std::vector<bool> is_unknown(n, false);
  for (std::size_t u : unknown) is_unknown[u] = true;

  // rhs_t = -sum over known j of points_j^t y_j
  std::vector<FieldElement> rhs(r, field.zero());
  for (std::size_t j = 0; j < n; ++j) {
    if (is_unknown[j] || word[j].is_zero()) continue;
    FieldElement term = word[j];
    for (std::size_t t = 0; t < r; ++t) {
      rhs[t] = field.sub(rhs[t], term);
      term = field.mul(term, points[j]);
    }
  }
  std::vector<FieldElement> m(r * r);
  for (std::size_t c = 0; c < r; ++c) {
    FieldElement power = field.one();
    for (std::size_t t = 0; t < r; ++t) {
      m[t * r + c] = power;
      power = field.mul(power, points[unknown[c]]);
    }
  }
  eliminate(field, m, rhs);
  for (std::size_t c = 0; c < r; ++c) word[unknown[c]] = rhs[c];
}

std::vector<FieldElement> grs_erasure_recover(const Field& field, std::span<const FieldElement> points,
                                              std::size_t parity, const std::map<std::size_t, FieldElement>& known) {
  const std::size_t n = points.size();
  if (parity >= n) fail(ErrorKind::invalid_argument, "need at least one known coordinate (parity < length)");
  if (known.size() != n - parity) {
    fail(ErrorKind::invalid_argument, "expected " + std::to_string(n - parity) + " known coordinates, got " +
                                          std::to_string(known.size()));
  }
  require_distinct(points);
  std::vector<FieldElement> word(n, field.zero());
  std::vector<bool> have(n, false);
  for (const auto& [pos, value] : known) {
    if (pos >= n) fail(ErrorKind::invalid_argument, "known position out of range");
    word[pos] = value;
    have[pos] = true;
  }
  std::vector<std::size_t> unknown;
  for (std::size_t j = 0; j < n; ++j) {
    if (!have[j]) unknown.push_back(j);
  }
  grs_fill_unknowns(field, points, word, unknown);
  return word;
}

}  // namespace coopmds
