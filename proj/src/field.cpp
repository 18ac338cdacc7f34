#include "coopmds/field.hpp"

#include <array>
#include <charconv>
#include <map>
#include <mutex>

#include "coopmds/error.hpp"

namespace coopmds {
namespace {

// Full polynomials including the leading x^w term.
constexpr std::array<std::uint32_t, 17> kReductionPolynomials = {
    0,       0x3,    0x7,    0xB,    0x13,   0x25,   0x43,   0x89,   0x11B,
    0x211,   0x409,  0x805,  0x1053, 0x201B, 0x4443, 0x8003, 0x1100B,
};

std::uint32_t slow_mul(const FieldSpec& spec, std::uint32_t a, std::uint32_t b) {
  if (spec.kind == FieldKind::prime) {
    return static_cast<std::uint32_t>(std::uint64_t{a} * b % spec.modulus);
  }
  const std::uint32_t w = spec.modulus;
  const std::uint32_t poly = kReductionPolynomials[w];
  std::uint32_t acc = 0;
  while (b != 0) {
    if (b & 1u) acc ^= a;
    b >>= 1;
    a <<= 1;
    if (a & (1u << w)) a ^= poly;
  }
  return acc;
}

struct Tables {
  std::shared_ptr<const std::vector<std::uint32_t>> log;
  std::shared_ptr<const std::vector<std::uint32_t>> exp;
};

Tables build_tables(const FieldSpec& spec) {
  const std::uint32_t q = spec.order();
  const std::uint32_t group = q - 1;
  auto log = std::make_shared<std::vector<std::uint32_t>>(q, 0);
  auto exp = std::make_shared<std::vector<std::uint32_t>>(2 * std::size_t{group} + 1, 0);
  for (std::uint32_t g = 1; g < q; ++g) {
    std::uint32_t x = 1;
    bool generator = true;
    for (std::uint32_t i = 0; i < group; ++i) {
      (*exp)[i] = x;
      x = slow_mul(spec, x, g);
      if (x == 1 && i + 1 < group) {
        generator = false;
        break;
      }
    }
    if (!generator || x != 1) continue;
    for (std::uint32_t i = 0; i < group; ++i) {
      (*exp)[i + group] = (*exp)[i];
      (*log)[(*exp)[i]] = i;
    }
    (*exp)[2 * std::size_t{group}] = (*exp)[0];
    return {std::move(log), std::move(exp)};
  }
  fail(ErrorKind::invalid_argument, "no multiplicative generator for " + spec.to_string());
}

const Tables& cached_tables(const FieldSpec& spec) {
  static std::mutex mutex;
  static std::map<std::pair<int, std::uint32_t>, Tables> cache;
  std::lock_guard lock(mutex);
  auto key = std::make_pair(static_cast<int>(spec.kind), spec.modulus);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, build_tables(spec)).first;
  return it->second;
}

std::uint32_t parse_uint(std::string_view text, std::string_view original) {
  std::uint32_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    fail(ErrorKind::invalid_argument, "malformed field descriptor '" + std::string(original) + "'");
  }
  return value;
}

}  // namespace

bool is_prime(std::uint32_t value) {
  if (value < 2) return false;
  for (std::uint32_t f = 2; std::uint64_t{f} * f <= value; ++f) {
    if (value % f == 0) return false;
  }
  return true;
}

std::uint32_t reduction_polynomial(std::uint32_t w) {
  if (w < 1 || w > 16) fail(ErrorKind::invalid_argument, "binary field exponent out of range [1,16]");
  return kReductionPolynomials[w];
}

FieldSpec FieldSpec::parse(std::string_view text) {
  if (text.rfind("gf2^", 0) == 0) return binary(parse_uint(text.substr(4), text));
  if (text.rfind("prime:", 0) == 0) return prime(parse_uint(text.substr(6), text));
  if (text.rfind("gf", 0) == 0) {
    std::uint32_t q = parse_uint(text.substr(2), text);
    for (std::uint32_t w = 1; w <= 16; ++w) {
      if ((1u << w) == q) return binary(w);
    }
    if (is_prime(q)) return prime(q);
    fail(ErrorKind::invalid_argument, "unsupported field order " + std::to_string(q));
  }
  if (text.rfind("p", 0) == 0) return prime(parse_uint(text.substr(1), text));
  fail(ErrorKind::invalid_argument, "malformed field descriptor '" + std::string(text) + "'");
}

std::uint32_t FieldSpec::order() const {
  return kind == FieldKind::prime ? modulus : (1u << modulus);
}

std::string FieldSpec::to_string() const {
  return kind == FieldKind::prime ? "p" + std::to_string(modulus) : "gf2^" + std::to_string(modulus);
}

void FieldSpec::validate() const {
  if (kind == FieldKind::prime) {
    if (modulus > 0xFFFF) fail(ErrorKind::invalid_argument, "prime modulus must fit in 16 bits");
    if (!is_prime(modulus)) fail(ErrorKind::invalid_argument, std::to_string(modulus) + " is not prime");
  } else if (kind == FieldKind::binary) {
    if (modulus < 1 || modulus > 16) fail(ErrorKind::invalid_argument, "binary field exponent out of range [1,16]");
  } else {
    fail(ErrorKind::invalid_argument, "unknown field kind");
  }
}

Field::Field(FieldSpec spec) : spec_(spec) {
  spec_.validate();
  order_ = spec_.order();
  binary_ = spec_.kind == FieldKind::binary;
  const Tables& t = cached_tables(spec_);
  log_table_ = t.log;
  exp_table_ = t.exp;
  log_ = log_table_->data();
  exp_ = exp_table_->data();
}

FieldElement Field::element(std::uint32_t v) const {
  if (v >= order_) {
    fail(ErrorKind::invalid_argument, std::to_string(v) + " is not an element of " + spec_.to_string());
  }
  return FieldElement(v);
}

FieldElement Field::inv(FieldElement a) const {
  if (a.is_zero()) fail(ErrorKind::invalid_argument, "zero has no inverse");
  const std::uint32_t group = order_ - 1;
  return FieldElement(exp_[(group - log_[a.value()]) % group]);
}

FieldElement Field::div(FieldElement a, FieldElement b) const { return mul(a, inv(b)); }

FieldElement Field::pow(FieldElement a, std::uint64_t t) const {
  FieldElement result = one();
  FieldElement base = a;
  while (t != 0) {
    if (t & 1u) result = mul(result, base);
    base = mul(base, base);
    t >>= 1;
  }
  return result;
}

Field make_field(FieldSpec spec) { return Field(spec); }

std::vector<FieldElement> enumerate_elements(const Field& field, std::size_t count) {
  if (count > field.order()) {
    fail(ErrorKind::invalid_argument, "requested " + std::to_string(count) + " distinct elements from " +
                                          field.spec().to_string());
  }
  std::vector<FieldElement> out;
  out.reserve(count);
  for (std::size_t v = 0; v < count; ++v) out.emplace_back(static_cast<std::uint32_t>(v));
  return out;
}

FieldSpec minimal_field(std::uint32_t min_order) {
  if (min_order > 65536) fail(ErrorKind::inadmissible, "no supported field has " + std::to_string(min_order) + " elements");
  std::uint32_t w = 1;
  while ((1u << w) < min_order) ++w;
  std::uint32_t p = std::max<std::uint32_t>(min_order, 2);
  while (p < (1u << w) && !is_prime(p)) ++p;
  if (p < (1u << w)) return FieldSpec::prime(p);
  return FieldSpec::binary(w);
}

}  // namespace coopmds
