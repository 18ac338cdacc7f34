#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "coopmds/field.hpp"

namespace coopmds {

/// Storage node index, 1-based.
using NodeId = int;

/// fixed_subset repairs nodes {1..h}; any_subset repairs every h-subset;
/// concatenated is the product of several component codes.
enum class Family : std::uint8_t { fixed_subset = 0, any_subset = 1, concatenated = 2 };

const char* to_string(Family family);
Family parse_family(std::string_view text);

struct CodeParams {
  int n = 0;
  int k = 0;
  int r = 0;
  int h = 0;  // h, d, s and m are zero for concatenated specs
  int d = 0;
  int s = 0;
  std::uint64_t m = 0;  // number of index blocks: C(n,h) for any_subset, 1 for fixed_subset
  std::uint64_t l = 0;  // sub-packetization
};

inline constexpr std::uint64_t kDefaultSubpacketizationCap = std::uint64_t{1} << 24;

using Digits = std::vector<std::uint8_t>;

/// h-digit vectors over [0, s-1] with at most one digit equal to s-1, in
/// lexicographic order.
std::vector<Digits> build_A(int h, int s);
/// Vectors with digit i in [0, s-1] and every other digit in [0, s-2]; i is 1-based.
std::vector<Digits> build_B(int h, int s, int i);
std::vector<Digits> build_A0(int h, int s);

std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

/// Rank of a strictly increasing subset of [n] in [1, C(n, |F|)]:
/// g({i_h > ... > i_1}) = sum_j C(i_j - 1, j) + 1.
std::uint64_t subset_rank(std::span<const NodeId> subset);
std::vector<NodeId> subset_unrank(std::uint64_t rank, int n, int h);
/// Number of elements of `subset` that are <= i.
int subset_position(std::span<const NodeId> subset, NodeId i);

/// Row label: a digit vector split into blocks. Non-concatenated specs use m
/// blocks of h digits, block 1 being the least significant; concatenated specs
/// chain their components' blocks in component order.
class MultiIndex {
 public:
  MultiIndex() = default;
  MultiIndex(Digits digits, std::vector<std::uint32_t> block_sizes);

  std::size_t blocks() const { return starts_.size(); }
  /// j is 1-based.
  std::span<const std::uint8_t> block(std::size_t j) const;
  const Digits& digits() const { return digits_; }
  const std::vector<std::uint32_t>& block_sizes() const { return sizes_; }
  /// Copy with block j replaced by b.
  MultiIndex with_block(std::size_t j, std::span<const std::uint8_t> b) const;

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

 private:
  Digits digits_;
  std::vector<std::uint32_t> sizes_;
  std::vector<std::uint32_t> starts_;
};

/// Immutable code description: parameters, field, coefficient table lambda and
/// the precomputed row-coefficient rule. Copies share the underlying tables.
class CodeSpec {
 public:
  Family family() const;
  const CodeParams& params() const;
  const FieldSpec& field_spec() const;
  const Field& field() const;
  int n() const { return params().n; }
  int k() const { return params().k; }
  std::uint64_t rows() const { return params().l; }

  const std::vector<CodeSpec>& components() const;
  /// Row stride of component j: the product of the l values of components before it.
  std::uint64_t component_stride(std::size_t j) const;

  /// Distinct coefficients owned by node i; the coefficient of node i in any
  /// row is lambdas(i)[key].
  std::span<const FieldElement> lambdas(NodeId i) const;

  /// The index set A of a non-concatenated spec.
  const std::vector<Digits>& index_set() const;
  /// Rank of b within A, or -1 if b is not in A.
  std::int64_t rank_in_index_set(std::span<const std::uint8_t> b) const;

  MultiIndex index_of(std::uint64_t row) const;
  std::uint64_t row_of(const MultiIndex& index) const;

  std::uint32_t key(std::uint64_t row, NodeId i) const;
  FieldElement coeff(std::uint64_t row, NodeId i) const;
  /// The n coefficients of one parity row.
  std::span<const FieldElement> row_coeffs(std::uint64_t row) const;

  struct Impl;

 private:
  friend struct SpecAccess;
  std::shared_ptr<const Impl> impl_;
};

/// Validates (n, k, h, d) for a family and computes s, m and l.
CodeParams code_params(Family family, int n, int k, int h, int d);
/// Number of distinct field elements the family consumes.
std::uint32_t required_field_order(Family family, int n, int k, int h, int d);

CodeSpec make_code(Family family, int n, int k, int h, int d, FieldSpec field,
                   std::uint64_t cap = kDefaultSubpacketizationCap);
/// Product code; every component must share (n, k) and the field.
CodeSpec concat(std::vector<CodeSpec> codes, std::uint64_t cap = kDefaultSubpacketizationCap);
/// (h, d) pairs covered by the universal code: 1 <= h <= n - d, d >= k + 1.
std::vector<std::pair<int, int>> universal_pairs(int n, int k);
CodeSpec make_universal(int n, int k, FieldSpec field, std::uint64_t cap = kDefaultSubpacketizationCap);
/// Sub-packetization of the product of codes with the given l values (throws on overflow).
std::uint64_t concat_subpacketization(std::span<const std::uint64_t> ls);

/// Coefficient selector f(i, a): sum over h-subsets F containing i of
/// a^{(g(F))}_{z(F,i)} mod s. For fixed-subset specs this is a_i for i <= h and 0 otherwise.
int mask_f(const CodeSpec& spec, NodeId i, const MultiIndex& index);
/// The same rule from parameters alone, so it can be evaluated where the code
/// itself would be too large to build.
int mask_f(Family family, int n, int h, int s, NodeId i, const MultiIndex& index);
/// Coefficient of node i in row `index`, evaluated from the index digits.
FieldElement row_coeff(const CodeSpec& spec, NodeId i, const MultiIndex& index);

std::vector<std::uint8_t> serialize(const CodeSpec& spec);
/// Reads one serialized spec starting at bytes[0]; `consumed` receives its length.
CodeSpec deserialize(std::span<const std::uint8_t> bytes, std::size_t* consumed = nullptr,
                     std::uint64_t cap = kDefaultSubpacketizationCap);

}  // namespace coopmds
