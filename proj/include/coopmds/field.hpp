#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace coopmds {

enum class FieldKind : std::uint8_t { prime = 0, binary = 1 };

/// Describes a finite field: GF(p) for a prime p < 2^16, or GF(2^w) for 1 <= w <= 16.
struct FieldSpec {
  FieldKind kind = FieldKind::binary;
  std::uint32_t modulus = 8;  // p for prime fields, w for GF(2^w)

  static FieldSpec prime(std::uint32_t p) { return {FieldKind::prime, p}; }
  static FieldSpec binary(std::uint32_t w) { return {FieldKind::binary, w}; }

  /// Parses "gf2^8", "gf256", "gf65536", "p257" or "prime:257".
  static FieldSpec parse(std::string_view text);

  std::uint32_t order() const;
  std::string to_string() const;
  void validate() const;

  friend bool operator==(const FieldSpec&, const FieldSpec&) = default;
};

/// A field symbol. The value is the canonical residue (prime fields) or the
/// polynomial-basis bit pattern (binary fields); arithmetic goes through Field.
class FieldElement {
 public:
  constexpr FieldElement() = default;
  constexpr explicit FieldElement(std::uint32_t v) : v_(static_cast<std::uint16_t>(v)) {}

  constexpr std::uint32_t value() const { return v_; }
  constexpr bool is_zero() const { return v_ == 0; }

  friend constexpr auto operator<=>(FieldElement, FieldElement) = default;

 private:
  std::uint16_t v_ = 0;
};

class Field {
 public:
  explicit Field(FieldSpec spec);

  const FieldSpec& spec() const { return spec_; }
  std::uint32_t order() const { return order_; }

  FieldElement zero() const { return FieldElement(0); }
  FieldElement one() const { return FieldElement(1); }
  /// Throws if v is not below the field order.
  FieldElement element(std::uint32_t v) const;

  FieldElement add(FieldElement a, FieldElement b) const {
    if (binary_) return FieldElement(a.value() ^ b.value());
    std::uint32_t s = a.value() + b.value();
    return FieldElement(s >= order_ ? s - order_ : s);
  }
  FieldElement neg(FieldElement a) const {
    if (binary_ || a.is_zero()) return a;
    return FieldElement(order_ - a.value());
  }
  FieldElement sub(FieldElement a, FieldElement b) const { return add(a, neg(b)); }
  FieldElement mul(FieldElement a, FieldElement b) const {
    if (a.is_zero() || b.is_zero()) return zero();
    return FieldElement(exp_[log_[a.value()] + log_[b.value()]]);
  }
  FieldElement inv(FieldElement a) const;
  FieldElement div(FieldElement a, FieldElement b) const;
  /// Square-and-multiply; pow(x, 0) == 1 for every x, including 0.
  FieldElement pow(FieldElement a, std::uint64_t t) const;

 private:
  FieldSpec spec_;
  std::uint32_t order_ = 0;
  bool binary_ = false;
  std::shared_ptr<const std::vector<std::uint32_t>> log_table_;
  std::shared_ptr<const std::vector<std::uint32_t>> exp_table_;
  const std::uint32_t* log_ = nullptr;
  const std::uint32_t* exp_ = nullptr;
};

Field make_field(FieldSpec spec);

/// The first `count` elements in ascending value order.
std::vector<FieldElement> enumerate_elements(const Field& field, std::size_t count);

/// Reduction polynomial (including the x^w term) used for GF(2^w).
std::uint32_t reduction_polynomial(std::uint32_t w);

bool is_prime(std::uint32_t value);

/// Smallest supported field (prime or power of two) with at least `min_order` elements.
FieldSpec minimal_field(std::uint32_t min_order);

}  // namespace coopmds
