#include "coopmds/codespec.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "coopmds/error.hpp"

namespace coopmds {

struct CodeSpec::Impl {
  explicit Impl(FieldSpec spec) : field(spec) {}

  Family family = Family::fixed_subset;
  CodeParams params;
  Field field;

  // concatenated specs
  std::vector<CodeSpec> components;
  std::vector<std::uint64_t> strides;

  // non-concatenated specs
  std::vector<Digits> index_set;
  std::vector<std::int32_t> dense_rank;  // mixed-radix code of b -> rank in A, or -1
  // any_subset: node -> (block, digit position) pairs whose digits sum to f(i, a)
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> memberships;

  std::vector<std::uint32_t> radix;  // number of coefficients per node (0-based node)
  std::vector<std::vector<FieldElement>> lambdas;
  std::vector<std::uint16_t> keys;     // l x n
  std::vector<FieldElement> coeffs;    // l x n
};

struct SpecAccess {
  static const CodeSpec::Impl& impl(const CodeSpec& spec) { return *spec.impl_; }
  static CodeSpec wrap(std::shared_ptr<const CodeSpec::Impl> impl) {
    CodeSpec spec;
    spec.impl_ = std::move(impl);
    return spec;
  }
};

namespace {

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b, const char* what) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) {
    fail(ErrorKind::inadmissible, std::string(what) + " overflows 64 bits");
  }
  return a * b;
}

std::uint64_t checked_pow(std::uint64_t base, std::uint64_t exp, const char* what) {
  std::uint64_t out = 1;
  for (std::uint64_t i = 0; i < exp; ++i) out = checked_mul(out, base, what);
  return out;
}

std::size_t dense_code(std::span<const std::uint8_t> b, int s) {
  std::size_t code = 0;
  for (auto it = b.rbegin(); it != b.rend(); ++it) code = code * static_cast<std::size_t>(s) + *it;
  return code;
}

void check_node(const CodeParams& p, NodeId i) {
  if (i < 1 || i > p.n) fail(ErrorKind::invalid_argument, "node " + std::to_string(i) + " out of range");
}

void assign_lambdas(CodeSpec::Impl& impl) {
  std::uint64_t total = 0;
  for (std::uint32_t r : impl.radix) total += r;
  if (total > impl.field.order()) {
    fail(ErrorKind::inadmissible, "field " + impl.field.spec().to_string() + " has fewer than the " +
                                      std::to_string(total) + " distinct elements the code needs");
  }
  const auto elements = enumerate_elements(impl.field, static_cast<std::size_t>(total));
  std::size_t next = 0;
  impl.lambdas.resize(impl.radix.size());
  for (std::size_t i = 0; i < impl.radix.size(); ++i) {
    impl.lambdas[i].assign(elements.begin() + static_cast<std::ptrdiff_t>(next),
                           elements.begin() + static_cast<std::ptrdiff_t>(next + impl.radix[i]));
    next += impl.radix[i];
  }
}

void fill_coefficients(CodeSpec::Impl& impl) {
  const std::size_t n = static_cast<std::size_t>(impl.params.n);
  impl.coeffs.resize(impl.keys.size());
  for (std::size_t cell = 0; cell < impl.keys.size(); ++cell) {
    impl.coeffs[cell] = impl.lambdas[cell % n][impl.keys[cell]];
  }
}

}  // namespace

const char* to_string(Family family) {
  switch (family) {
    case Family::fixed_subset: return "fixed_subset";
    case Family::any_subset: return "any_subset";
    case Family::concatenated: return "concatenated";
  }
  return "unknown";
}

Family parse_family(std::string_view text) {
  if (text == "fixed_subset" || text == "fixed") return Family::fixed_subset;
  if (text == "any_subset" || text == "any") return Family::any_subset;
  if (text == "concatenated" || text == "concat") return Family::concatenated;
  fail(ErrorKind::invalid_argument, "unknown code family '" + std::string(text) + "'");
}

// --- index sets ---------------------------------------------------------

std::vector<Digits> build_A(int h, int s) {
  if (h < 1 || s < 2 || s > 255) fail(ErrorKind::invalid_argument, "build_A needs h >= 1 and 2 <= s <= 255");
  std::vector<Digits> out;
  Digits cur(static_cast<std::size_t>(h), 0);
  while (true) {
    if (std::count(cur.begin(), cur.end(), static_cast<std::uint8_t>(s - 1)) <= 1) out.push_back(cur);
    int pos = h - 1;
    while (pos >= 0 && cur[static_cast<std::size_t>(pos)] == s - 1) cur[static_cast<std::size_t>(pos--)] = 0;
    if (pos < 0) break;
    ++cur[static_cast<std::size_t>(pos)];
  }
  return out;
}

std::vector<Digits> build_B(int h, int s, int i) {
  if (i < 1 || i > h) fail(ErrorKind::invalid_argument, "B_i needs i in [1, h]");
  std::vector<Digits> out;
  for (auto& a : build_A(h, s)) {
    bool ok = true;
    for (int j = 0; j < h; ++j) {
      if (j != i - 1 && a[static_cast<std::size_t>(j)] > s - 2) ok = false;
    }
    if (ok) out.push_back(std::move(a));
  }
  return out;
}

std::vector<Digits> build_A0(int h, int s) {
  std::vector<Digits> out;
  for (auto& a : build_A(h, s)) {
    if (std::all_of(a.begin(), a.end(), [s](std::uint8_t x) { return x <= s - 2; })) out.push_back(std::move(a));
  }
  return out;
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t out = 1;
  for (std::uint64_t j = 1; j <= k; ++j) out = out * (n - k + j) / j;
  return out;
}

std::uint64_t subset_rank(std::span<const NodeId> subset) {
  if (subset.empty()) fail(ErrorKind::invalid_argument, "empty subset");
  std::uint64_t rank = 1;
  for (std::size_t j = 0; j < subset.size(); ++j) {
    if (subset[j] < 1 || (j > 0 && subset[j] <= subset[j - 1])) {
      fail(ErrorKind::invalid_argument, "subset must be strictly increasing within [n]");
    }
    rank += binomial(static_cast<std::uint64_t>(subset[j] - 1), j + 1);
  }
  return rank;
}

std::vector<NodeId> subset_unrank(std::uint64_t rank, int n, int h) {
  if (h < 1 || h > n || rank < 1 || rank > binomial(static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(h))) {
    fail(ErrorKind::invalid_argument, "subset rank out of range");
  }
  std::vector<NodeId> out(static_cast<std::size_t>(h));
  std::uint64_t rem = rank - 1;
  int limit = n;
  for (int j = h; j >= 1; --j) {
    int c = limit - 1;
    while (binomial(static_cast<std::uint64_t>(c), static_cast<std::uint64_t>(j)) > rem) --c;
    out[static_cast<std::size_t>(j - 1)] = c + 1;
    rem -= binomial(static_cast<std::uint64_t>(c), static_cast<std::uint64_t>(j));
    limit = c;
  }
  return out;
}

int subset_position(std::span<const NodeId> subset, NodeId i) {
  return static_cast<int>(std::count_if(subset.begin(), subset.end(), [i](NodeId x) { return x <= i; }));
}

// --- MultiIndex ---------------------------------------------------------

MultiIndex::MultiIndex(Digits digits, std::vector<std::uint32_t> block_sizes)
    : digits_(std::move(digits)), sizes_(std::move(block_sizes)) {
  std::uint32_t at = 0;
  for (std::uint32_t size : sizes_) {
    starts_.push_back(at);
    at += size;
  }
  if (at != digits_.size()) fail(ErrorKind::invalid_argument, "block sizes do not cover the digit vector");
}

std::span<const std::uint8_t> MultiIndex::block(std::size_t j) const {
  if (j < 1 || j > starts_.size()) fail(ErrorKind::invalid_argument, "block index out of range");
  return std::span<const std::uint8_t>(digits_).subspan(starts_[j - 1], sizes_[j - 1]);
}

MultiIndex MultiIndex::with_block(std::size_t j, std::span<const std::uint8_t> b) const {
  if (j < 1 || j > starts_.size() || b.size() != sizes_[j - 1]) {
    fail(ErrorKind::invalid_argument, "replacement block does not fit");
  }
  MultiIndex out = *this;
  std::copy(b.begin(), b.end(), out.digits_.begin() + starts_[j - 1]);
  return out;
}

// --- parameters ---------------------------------------------------------

CodeParams code_params(Family family, int n, int k, int h, int d) {
  if (family == Family::concatenated) fail(ErrorKind::invalid_argument, "concatenated specs are built with concat()");
  if (n < 3 || k < 1 || k >= n) fail(ErrorKind::inadmissible, "need 1 <= k < n");
  if (h < 1 || d < k + 1 || h > n - d) {
    fail(ErrorKind::inadmissible, "inadmissible (h, d) = (" + std::to_string(h) + ", " + std::to_string(d) +
                                      ") for n = " + std::to_string(n) + ", k = " + std::to_string(k) +
                                      ": need 1 <= h <= n - d and d >= k + 1");
  }
  CodeParams p;
  p.n = n;
  p.k = k;
  p.r = n - k;
  p.h = h;
  p.d = d;
  p.s = d + 1 - k;
  if (p.s > 255) fail(ErrorKind::inadmissible, "s = d + 1 - k must be below 256");
  const std::uint64_t block = checked_mul(static_cast<std::uint64_t>(h + p.s - 1),
                                          checked_pow(static_cast<std::uint64_t>(p.s - 1),
                                                      static_cast<std::uint64_t>(h - 1), "sub-packetization"),
                                          "sub-packetization");
  if (family == Family::fixed_subset) {
    p.m = 1;
    p.l = block;
  } else {
    p.m = binomial(static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(h));
    p.l = checked_pow(block, p.m, "sub-packetization");
  }
  return p;
}

std::uint32_t required_field_order(Family family, int n, int k, int h, int d) {
  const CodeParams p = code_params(family, n, k, h, d);
  if (family == Family::fixed_subset) return static_cast<std::uint32_t>(n + h * (p.s - 1));
  return static_cast<std::uint32_t>(p.s * n);
}

std::uint64_t concat_subpacketization(std::span<const std::uint64_t> ls) {
  std::uint64_t l = 1;
  for (std::uint64_t x : ls) l = checked_mul(l, x, "concatenated sub-packetization");
  return l;
}

// --- construction -------------------------------------------------------

CodeSpec make_code(Family family, int n, int k, int h, int d, FieldSpec field, std::uint64_t cap) {
  field.validate();
  const CodeParams p = code_params(family, n, k, h, d);
  if (p.l > cap) {
    fail(ErrorKind::inadmissible, "sub-packetization " + std::to_string(p.l) + " exceeds the cap " + std::to_string(cap));
  }
  auto impl = std::make_shared<CodeSpec::Impl>(field);
  impl->family = family;
  impl->params = p;
  impl->index_set = build_A(h, p.s);

  std::uint64_t dense_size = checked_pow(static_cast<std::uint64_t>(p.s), static_cast<std::uint64_t>(h), "index set");
  if (dense_size > (std::uint64_t{1} << 26)) fail(ErrorKind::inadmissible, "index set too large");
  impl->dense_rank.assign(dense_size, -1);
  for (std::size_t rank = 0; rank < impl->index_set.size(); ++rank) {
    impl->dense_rank[dense_code(impl->index_set[rank], p.s)] = static_cast<std::int32_t>(rank);
  }

  const auto un = static_cast<std::size_t>(n);
  impl->radix.assign(un, 1);
  if (family == Family::fixed_subset) {
    for (int i = 0; i < h; ++i) impl->radix[static_cast<std::size_t>(i)] = static_cast<std::uint32_t>(p.s);
  } else {
    std::fill(impl->radix.begin(), impl->radix.end(), static_cast<std::uint32_t>(p.s));
    impl->memberships.resize(un);
    for (std::uint64_t g = 1; g <= p.m; ++g) {
      const auto subset = subset_unrank(g, n, h);
      for (std::size_t z = 0; z < subset.size(); ++z) {
        impl->memberships[static_cast<std::size_t>(subset[z] - 1)].emplace_back(static_cast<std::uint32_t>(g - 1),
                                                                               static_cast<std::uint32_t>(z));
      }
    }
  }
  assign_lambdas(*impl);

  const std::uint64_t block_count = impl->index_set.size();
  impl->keys.assign(p.l * un, 0);
  std::vector<std::uint32_t> ranks(p.m);
  for (std::uint64_t row = 0; row < p.l; ++row) {
    std::uint16_t* keys = &impl->keys[row * un];
    if (family == Family::fixed_subset) {
      const Digits& a = impl->index_set[row];
      for (int i = 0; i < h; ++i) keys[i] = a[static_cast<std::size_t>(i)];
      continue;
    }
    std::uint64_t rest = row;
    for (std::uint64_t b = 0; b < p.m; ++b) {
      ranks[b] = static_cast<std::uint32_t>(rest % block_count);
      rest /= block_count;
    }
    for (std::size_t i = 0; i < un; ++i) {
      std::uint32_t sum = 0;
      for (const auto& [b, z] : impl->memberships[i]) sum += impl->index_set[ranks[b]][z];
      keys[i] = static_cast<std::uint16_t>(sum % static_cast<std::uint32_t>(p.s));
    }
  }
  fill_coefficients(*impl);
  return SpecAccess::wrap(std::move(impl));
}

CodeSpec concat(std::vector<CodeSpec> codes, std::uint64_t cap) {
  if (codes.empty()) fail(ErrorKind::invalid_argument, "concat needs at least one component");
  std::vector<CodeSpec> flat;
  for (auto& c : codes) {
    if (c.family() == Family::concatenated) {
      for (const auto& inner : c.components()) flat.push_back(inner);
    } else {
      flat.push_back(std::move(c));
    }
  }
  const CodeSpec& first = flat.front();
  for (const auto& c : flat) {
    if (c.n() != first.n() || c.k() != first.k()) fail(ErrorKind::invalid_argument, "concat components must share (n, k)");
    if (c.field_spec() != first.field_spec()) fail(ErrorKind::invalid_argument, "concat components must share the field");
  }
  std::vector<std::uint64_t> ls;
  for (const auto& c : flat) ls.push_back(c.rows());
  const std::uint64_t l = concat_subpacketization(ls);
  if (l > cap) fail(ErrorKind::inadmissible, "sub-packetization " + std::to_string(l) + " exceeds the cap " + std::to_string(cap));

  auto impl = std::make_shared<CodeSpec::Impl>(first.field_spec());
  impl->family = Family::concatenated;
  impl->params.n = first.n();
  impl->params.k = first.k();
  impl->params.r = first.n() - first.k();
  impl->params.l = l;
  impl->components = flat;
  std::uint64_t stride = 1;
  for (const auto& c : flat) {
    impl->strides.push_back(stride);
    stride *= c.rows();
  }

  const auto un = static_cast<std::size_t>(first.n());
  // per component, per node: multiplier of the component key inside the node key
  std::vector<std::vector<std::uint32_t>> weight(flat.size(), std::vector<std::uint32_t>(un));
  impl->radix.assign(un, 1);
  for (std::size_t j = 0; j < flat.size(); ++j) {
    const auto& comp = SpecAccess::impl(flat[j]);
    for (std::size_t i = 0; i < un; ++i) {
      weight[j][i] = impl->radix[i];
      impl->radix[i] = static_cast<std::uint32_t>(checked_mul(impl->radix[i], comp.radix[i], "coefficient count"));
      if (impl->radix[i] > 0xFFFF) fail(ErrorKind::inadmissible, "too many coefficients per node");
    }
  }
  assign_lambdas(*impl);

  impl->keys.assign(l * un, 0);
  for (std::uint64_t row = 0; row < l; ++row) {
    std::uint16_t* keys = &impl->keys[row * un];
    for (std::size_t j = 0; j < flat.size(); ++j) {
      const auto& comp = SpecAccess::impl(flat[j]);
      const std::uint64_t comp_row = (row / impl->strides[j]) % comp.params.l;
      const std::uint16_t* comp_keys = &comp.keys[comp_row * un];
      for (std::size_t i = 0; i < un; ++i) keys[i] = static_cast<std::uint16_t>(keys[i] + comp_keys[i] * weight[j][i]);
    }
  }
  fill_coefficients(*impl);
  return SpecAccess::wrap(std::move(impl));
}

std::vector<std::pair<int, int>> universal_pairs(int n, int k) {
  std::vector<std::pair<int, int>> out;
  for (int h = 1; h <= n - k - 1; ++h) {
    for (int d = k + 1; d <= n - h; ++d) out.emplace_back(h, d);
  }
  return out;
}

CodeSpec make_universal(int n, int k, FieldSpec field, std::uint64_t cap) {
  std::vector<std::uint64_t> ls;
  const auto pairs = universal_pairs(n, k);
  if (pairs.empty()) fail(ErrorKind::inadmissible, "no admissible (h, d) pairs");
  for (auto [h, d] : pairs) ls.push_back(code_params(Family::any_subset, n, k, h, d).l);
  const std::uint64_t l = concat_subpacketization(ls);
  if (l > cap) fail(ErrorKind::inadmissible, "sub-packetization " + std::to_string(l) + " exceeds the cap " + std::to_string(cap));
  std::vector<CodeSpec> parts;
  for (auto [h, d] : pairs) parts.push_back(make_code(Family::any_subset, n, k, h, d, field, cap));
  return concat(std::move(parts), cap);
}

// --- accessors ----------------------------------------------------------

Family CodeSpec::family() const { return impl_->family; }
const CodeParams& CodeSpec::params() const { return impl_->params; }
const FieldSpec& CodeSpec::field_spec() const { return impl_->field.spec(); }
const Field& CodeSpec::field() const { return impl_->field; }
const std::vector<CodeSpec>& CodeSpec::components() const { return impl_->components; }

std::uint64_t CodeSpec::component_stride(std::size_t j) const {
  if (impl_->family != Family::concatenated) return 1;
  return impl_->strides.at(j);
}

std::span<const FieldElement> CodeSpec::lambdas(NodeId i) const {
  check_node(impl_->params, i);
  return impl_->lambdas[static_cast<std::size_t>(i - 1)];
}

const std::vector<Digits>& CodeSpec::index_set() const {
  if (impl_->family == Family::concatenated) fail(ErrorKind::invalid_argument, "concatenated specs have no single index set");
  return impl_->index_set;
}

std::int64_t CodeSpec::rank_in_index_set(std::span<const std::uint8_t> b) const {
  const auto& p = impl_->params;
  if (impl_->family == Family::concatenated || b.size() != static_cast<std::size_t>(p.h)) return -1;
  for (auto x : b) {
    if (x >= p.s) return -1;
  }
  return impl_->dense_rank[dense_code(b, p.s)];
}

MultiIndex CodeSpec::index_of(std::uint64_t row) const {
  const auto& p = impl_->params;
  if (row >= p.l) fail(ErrorKind::invalid_argument, "row out of range");
  if (impl_->family == Family::concatenated) {
    Digits digits;
    std::vector<std::uint32_t> sizes;
    for (std::size_t j = 0; j < impl_->components.size(); ++j) {
      const auto& comp = impl_->components[j];
      MultiIndex part = comp.index_of((row / impl_->strides[j]) % comp.rows());
      digits.insert(digits.end(), part.digits().begin(), part.digits().end());
      sizes.insert(sizes.end(), part.block_sizes().begin(), part.block_sizes().end());
    }
    return MultiIndex(std::move(digits), std::move(sizes));
  }
  Digits digits;
  const std::uint64_t count = impl_->index_set.size();
  for (std::uint64_t b = 0; b < p.m; ++b) {
    const Digits& block = impl_->index_set[row % count];
    digits.insert(digits.end(), block.begin(), block.end());
    row /= count;
  }
  return MultiIndex(std::move(digits), std::vector<std::uint32_t>(p.m, static_cast<std::uint32_t>(p.h)));
}

std::uint64_t CodeSpec::row_of(const MultiIndex& index) const {
  const auto& p = impl_->params;
  if (impl_->family == Family::concatenated) {
    std::uint64_t row = 0;
    std::size_t block = 1;
    for (std::size_t j = 0; j < impl_->components.size(); ++j) {
      const auto& comp = impl_->components[j];
      Digits digits;
      std::vector<std::uint32_t> sizes;
      for (std::uint64_t b = 0; b < comp.params().m; ++b, ++block) {
        if (block > index.blocks()) fail(ErrorKind::invalid_argument, "index has too few blocks");
        auto part = index.block(block);
        digits.insert(digits.end(), part.begin(), part.end());
        sizes.push_back(static_cast<std::uint32_t>(part.size()));
      }
      row += comp.row_of(MultiIndex(std::move(digits), std::move(sizes))) * impl_->strides[j];
    }
    if (block != index.blocks() + 1) fail(ErrorKind::invalid_argument, "index has too many blocks");
    return row;
  }
  if (index.blocks() != p.m) fail(ErrorKind::invalid_argument, "index block count does not match the spec");
  std::uint64_t row = 0;
  for (std::size_t b = index.blocks(); b >= 1; --b) {
    const std::int64_t rank = rank_in_index_set(index.block(b));
    if (rank < 0) fail(ErrorKind::invalid_argument, "index block is not in A");
    row = row * impl_->index_set.size() + static_cast<std::uint64_t>(rank);
  }
  return row;
}

std::uint32_t CodeSpec::key(std::uint64_t row, NodeId i) const {
  check_node(impl_->params, i);
  return impl_->keys[row * static_cast<std::uint64_t>(impl_->params.n) + static_cast<std::uint64_t>(i - 1)];
}

FieldElement CodeSpec::coeff(std::uint64_t row, NodeId i) const {
  return impl_->coeffs[row * static_cast<std::uint64_t>(impl_->params.n) + static_cast<std::uint64_t>(i - 1)];
}

std::span<const FieldElement> CodeSpec::row_coeffs(std::uint64_t row) const {
  const auto n = static_cast<std::size_t>(impl_->params.n);
  return std::span<const FieldElement>(impl_->coeffs).subspan(row * n, n);
}

// --- coefficient rule from index digits ---------------------------------

int mask_f(Family family, int n, int h, int s, NodeId i, const MultiIndex& index) {
  if (i < 1 || i > n) fail(ErrorKind::invalid_argument, "node " + std::to_string(i) + " out of range");
  if (h < 1 || h > n || s < 2) fail(ErrorKind::invalid_argument, "mask_f needs 1 <= h <= n and s >= 2");
  switch (family) {
    case Family::fixed_subset:
      return i <= h ? index.block(1)[static_cast<std::size_t>(i - 1)] : 0;
    case Family::any_subset: {
      if (index.blocks() != binomial(static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(h))) {
        fail(ErrorKind::invalid_argument, "index block count does not match C(n, h)");
      }
      int sum = 0;
      // every h-subset F of [n] containing i, in lexicographic order
      std::vector<NodeId> subset(static_cast<std::size_t>(h));
      for (int j = 0; j < h; ++j) subset[static_cast<std::size_t>(j)] = j + 1;
      while (true) {
        if (std::find(subset.begin(), subset.end(), i) != subset.end()) {
          const std::uint64_t g = subset_rank(subset);
          const int z = subset_position(subset, i);
          sum += index.block(g)[static_cast<std::size_t>(z - 1)];
        }
        int pos = h - 1;
        while (pos >= 0 && subset[static_cast<std::size_t>(pos)] == n - h + pos + 1) --pos;
        if (pos < 0) break;
        ++subset[static_cast<std::size_t>(pos)];
        for (int j = pos + 1; j < h; ++j) subset[static_cast<std::size_t>(j)] = subset[static_cast<std::size_t>(j - 1)] + 1;
      }
      return sum % s;
    }
    case Family::concatenated:
      break;
  }
  fail(ErrorKind::invalid_argument, "mask_f is defined per component of a concatenated spec");
}

int mask_f(const CodeSpec& spec, NodeId i, const MultiIndex& index) {
  const auto& p = spec.params();
  if (spec.family() == Family::concatenated) {
    fail(ErrorKind::invalid_argument, "mask_f is defined per component of a concatenated spec");
  }
  return mask_f(spec.family(), p.n, p.h, p.s, i, index);
}

FieldElement row_coeff(const CodeSpec& spec, NodeId i, const MultiIndex& index) {
  if (spec.family() != Family::concatenated) {
    return spec.lambdas(i)[static_cast<std::size_t>(mask_f(spec, i, index))];
  }
  std::uint32_t key = 0;
  std::uint32_t weight = 1;
  std::size_t block = 1;
  for (const auto& comp : spec.components()) {
    Digits digits;
    std::vector<std::uint32_t> sizes;
    for (std::uint64_t b = 0; b < comp.params().m; ++b, ++block) {
      auto part = index.block(block);
      digits.insert(digits.end(), part.begin(), part.end());
      sizes.push_back(static_cast<std::uint32_t>(part.size()));
    }
    key += static_cast<std::uint32_t>(mask_f(comp, i, MultiIndex(std::move(digits), std::move(sizes)))) * weight;
    weight *= static_cast<std::uint32_t>(comp.lambdas(i).size());
  }
  return spec.lambdas(i)[key];
}

// --- serialization ------------------------------------------------------

namespace {

void put_u16(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
}

std::uint32_t get_u16(std::span<const std::uint8_t> in, std::size_t& at) {
  if (at + 2 > in.size()) fail(ErrorKind::invalid_argument, "truncated code descriptor");
  std::uint32_t v = in[at] | (static_cast<std::uint32_t>(in[at + 1]) << 8);
  at += 2;
  return v;
}

std::uint32_t get_u8(std::span<const std::uint8_t> in, std::size_t& at) {
  if (at + 1 > in.size()) fail(ErrorKind::invalid_argument, "truncated code descriptor");
  return in[at++];
}

CodeSpec read_spec(std::span<const std::uint8_t> in, std::size_t& at, std::uint64_t cap) {
  const std::uint32_t tag = get_u8(in, at);
  if (tag > 2) fail(ErrorKind::invalid_argument, "unknown family tag");
  const int n = static_cast<int>(get_u16(in, at));
  const int k = static_cast<int>(get_u16(in, at));
  const int h = static_cast<int>(get_u16(in, at));
  const int d = static_cast<int>(get_u16(in, at));
  FieldSpec field;
  const std::uint32_t kind = get_u8(in, at);
  if (kind > 1) fail(ErrorKind::invalid_argument, "unknown field kind");
  field.kind = static_cast<FieldKind>(kind);
  field.modulus = get_u16(in, at);
  const auto family = static_cast<Family>(tag);
  if (family != Family::concatenated) return make_code(family, n, k, h, d, field, cap);
  const std::uint32_t count = get_u16(in, at);
  std::vector<CodeSpec> parts;
  for (std::uint32_t j = 0; j < count; ++j) parts.push_back(read_spec(in, at, cap));
  CodeSpec out = concat(std::move(parts), cap);
  if (out.n() != n || out.k() != k || out.field_spec() != field) {
    fail(ErrorKind::invalid_argument, "concatenated descriptor disagrees with its components");
  }
  return out;
}

}  // namespace

std::vector<std::uint8_t> serialize(const CodeSpec& spec) {
  std::vector<std::uint8_t> out;
  const auto& p = spec.params();
  out.push_back(static_cast<std::uint8_t>(spec.family()));
  put_u16(out, static_cast<std::uint32_t>(p.n));
  put_u16(out, static_cast<std::uint32_t>(p.k));
  put_u16(out, static_cast<std::uint32_t>(p.h));
  put_u16(out, static_cast<std::uint32_t>(p.d));
  out.push_back(static_cast<std::uint8_t>(spec.field_spec().kind));
  put_u16(out, spec.field_spec().modulus);
  if (spec.family() == Family::concatenated) {
    put_u16(out, static_cast<std::uint32_t>(spec.components().size()));
    for (const auto& c : spec.components()) {
      auto part = serialize(c);
      out.insert(out.end(), part.begin(), part.end());
    }
  }
  return out;
}

CodeSpec deserialize(std::span<const std::uint8_t> bytes, std::size_t* consumed, std::uint64_t cap) {
  std::size_t at = 0;
  CodeSpec spec = read_spec(bytes, at, cap);
  if (consumed != nullptr) *consumed = at;
  return spec;
}

}  // namespace coopmds
