#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "coopmds/codespec.hpp"

namespace coopmds {

/// l x n array of symbols stored row-major; column i is node i (1-based).
/// Erased columns read as zero.
class CodewordArray {
 public:
  explicit CodewordArray(CodeSpec spec);

  const CodeSpec& spec() const { return spec_; }
  std::uint64_t rows() const { return spec_.rows(); }
  int n() const { return spec_.n(); }

  FieldElement at(std::uint64_t row, NodeId i) const { return cells_[index(row, i)]; }
  void set(std::uint64_t row, NodeId i, FieldElement v) { cells_[index(row, i)] = v; }
  std::span<const FieldElement> row(std::uint64_t r) const;
  std::span<FieldElement> row(std::uint64_t r);

  std::vector<FieldElement> column(NodeId i) const;
  void set_column(NodeId i, std::span<const FieldElement> values);

  void erase(NodeId i);
  bool is_erased(NodeId i) const;
  std::vector<NodeId> erased() const;

  /// Compares symbols and erasure flags; the specs are assumed to agree.
  friend bool operator==(const CodewordArray& a, const CodewordArray& b) {
    return a.cells_ == b.cells_ && a.erased_ == b.erased_;
  }

 private:
  std::size_t index(std::uint64_t row, NodeId i) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(spec_.n()) + static_cast<std::size_t>(i - 1);
  }
  void check_node(NodeId i) const;

  CodeSpec spec_;
  std::vector<FieldElement> cells_;
  std::vector<bool> erased_;
};

/// `data` is l x k, row-major. Columns 1..k of the result equal the data.
CodewordArray encode_systematic(const CodeSpec& spec, std::span<const FieldElement> data);

/// Rebuilds the codeword from the first k of the given columns in ascending order.
CodewordArray decode_from_columns(const CodeSpec& spec, const std::map<NodeId, std::vector<FieldElement>>& available);

struct ParityVerdict {
  bool ok = true;
  std::uint64_t row = 0;  // first failing row and power, meaningful only when !ok
  int t = 0;
};

ParityVerdict verify_parity(const CodewordArray& word);

}  // namespace coopmds
