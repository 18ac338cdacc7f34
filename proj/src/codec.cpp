#include "coopmds/codec.hpp"

#include <string>

#include "coopmds/error.hpp"
#include "coopmds/grs.hpp"

namespace coopmds {

CodewordArray::CodewordArray(CodeSpec spec)
    : spec_(std::move(spec)),
      cells_(static_cast<std::size_t>(spec_.rows()) * static_cast<std::size_t>(spec_.n())),
      erased_(static_cast<std::size_t>(spec_.n()), false) {}

void CodewordArray::check_node(NodeId i) const {
  if (i < 1 || i > n()) fail(ErrorKind::invalid_argument, "node " + std::to_string(i) + " out of range");
}

std::span<const FieldElement> CodewordArray::row(std::uint64_t r) const {
  return std::span<const FieldElement>(cells_).subspan(index(r, 1), static_cast<std::size_t>(n()));
}

std::span<FieldElement> CodewordArray::row(std::uint64_t r) {
  return std::span<FieldElement>(cells_).subspan(index(r, 1), static_cast<std::size_t>(n()));
}

std::vector<FieldElement> CodewordArray::column(NodeId i) const {
  check_node(i);
  std::vector<FieldElement> out(static_cast<std::size_t>(rows()));
  for (std::uint64_t r = 0; r < rows(); ++r) out[r] = cells_[index(r, i)];
  return out;
}

void CodewordArray::set_column(NodeId i, std::span<const FieldElement> values) {
  check_node(i);
  if (values.size() != rows()) fail(ErrorKind::invalid_argument, "column length must equal l");
  for (std::uint64_t r = 0; r < rows(); ++r) cells_[index(r, i)] = values[r];
  erased_[static_cast<std::size_t>(i - 1)] = false;
}

void CodewordArray::erase(NodeId i) {
  check_node(i);
  for (std::uint64_t r = 0; r < rows(); ++r) cells_[index(r, i)] = FieldElement();
  erased_[static_cast<std::size_t>(i - 1)] = true;
}

bool CodewordArray::is_erased(NodeId i) const {
  check_node(i);
  return erased_[static_cast<std::size_t>(i - 1)];
}

std::vector<NodeId> CodewordArray::erased() const {
  std::vector<NodeId> out;
  for (NodeId i = 1; i <= n(); ++i) {
    if (erased_[static_cast<std::size_t>(i - 1)]) out.push_back(i);
  }
  return out;
}

CodewordArray encode_systematic(const CodeSpec& spec, std::span<const FieldElement> data) {
  const auto k = static_cast<std::size_t>(spec.k());
  if (data.size() != spec.rows() * k) {
    fail(ErrorKind::invalid_argument, "data must hold l * k = " + std::to_string(spec.rows() * k) + " symbols");
  }
  CodewordArray out(spec);
  std::vector<std::size_t> parity;
  for (std::size_t j = k; j < static_cast<std::size_t>(spec.n()); ++j) parity.push_back(j);
  for (std::uint64_t r = 0; r < spec.rows(); ++r) {
    auto word = out.row(r);
    std::copy_n(data.begin() + static_cast<std::ptrdiff_t>(r * k), k, word.begin());
    grs_fill_unknowns(spec.field(), spec.row_coeffs(r), word, parity);
  }
  return out;
}

CodewordArray decode_from_columns(const CodeSpec& spec, const std::map<NodeId, std::vector<FieldElement>>& available) {
  const auto k = static_cast<std::size_t>(spec.k());
  if (available.size() < k) {
    fail(ErrorKind::invalid_argument, "decoding needs " + std::to_string(k) + " columns, got " +
                                          std::to_string(available.size()));
  }
  CodewordArray out(spec);
  std::vector<bool> used(static_cast<std::size_t>(spec.n()), false);
  std::size_t taken = 0;
  for (const auto& [node, values] : available) {
    if (taken == k) break;
    out.set_column(node, values);
    used[static_cast<std::size_t>(node - 1)] = true;
    ++taken;
  }
  std::vector<std::size_t> unknown;
  for (std::size_t j = 0; j < used.size(); ++j) {
    if (!used[j]) unknown.push_back(j);
  }
  for (std::uint64_t r = 0; r < spec.rows(); ++r) {
    grs_fill_unknowns(spec.field(), spec.row_coeffs(r), out.row(r), unknown);
  }
  return out;
}

ParityVerdict verify_parity(const CodewordArray& word) {
  const CodeSpec& spec = word.spec();
  const Field& f = spec.field();
  const int r = spec.n() - spec.k();
  for (std::uint64_t row = 0; row < spec.rows(); ++row) {
    const auto coeffs = spec.row_coeffs(row);
    const auto cells = word.row(row);
    std::vector<FieldElement> terms(cells.begin(), cells.end());
    for (int t = 0; t < r; ++t) {
      FieldElement sum = f.zero();
      for (std::size_t i = 0; i < terms.size(); ++i) {
        sum = f.add(sum, terms[i]);
        terms[i] = f.mul(terms[i], coeffs[i]);
      }
      if (!sum.is_zero()) return {false, row, t};
    }
  }
  return {};
}

}  // namespace coopmds
