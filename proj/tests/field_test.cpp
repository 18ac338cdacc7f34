#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "coopmds/error.hpp"
#include "coopmds/field.hpp"
#include "oracles.hpp"

using namespace coopmds;

namespace {

oracle::Gf reference_for(const FieldSpec& spec) {
  if (spec.kind == FieldKind::prime) return oracle::Gf::prime(spec.modulus);
  return oracle::Gf::bin(spec.modulus, reduction_polynomial(spec.modulus));
}

std::vector<FieldSpec> small_fields() {
  std::vector<FieldSpec> out;
  for (std::uint32_t p : {2u, 3u, 5u, 7u, 11u, 13u, 17u, 31u}) out.push_back(FieldSpec::prime(p));
  for (std::uint32_t w = 1; w <= 5; ++w) out.push_back(FieldSpec::binary(w));
  return out;
}

}  // namespace

TEST_CASE("make_field orders and rejection of bad descriptors") {
  CHECK(make_field(FieldSpec::prime(7)).order() == 7);
  CHECK(make_field(FieldSpec::binary(8)).order() == 256);
  CHECK_THROWS_AS(make_field(FieldSpec::prime(9)), Error);
  CHECK_THROWS_AS(make_field(FieldSpec::binary(0)), Error);
  CHECK_THROWS_AS(make_field(FieldSpec::binary(17)), Error);
}

TEST_CASE("descriptor parsing") {
  CHECK(FieldSpec::parse("gf2^8") == FieldSpec::binary(8));
  CHECK(FieldSpec::parse("gf256") == FieldSpec::binary(8));
  CHECK(FieldSpec::parse("gf65536") == FieldSpec::binary(16));
  CHECK(FieldSpec::parse("p257") == FieldSpec::prime(257));
  CHECK(FieldSpec::parse("prime:7") == FieldSpec::prime(7));
  CHECK(FieldSpec::parse("gf11") == FieldSpec::prime(11));
  CHECK_THROWS_AS(FieldSpec::parse("gf9"), Error);
  CHECK_THROWS_AS(FieldSpec::parse("banana"), Error);
  CHECK(FieldSpec::binary(8).to_string() == "gf2^8");
  CHECK(FieldSpec::prime(7).to_string() == "p7");
}

TEST_CASE("published reduction polynomials") {
  CHECK(reduction_polynomial(8) == 0x11B);    // x^8+x^4+x^3+x+1
  CHECK(reduction_polynomial(16) == 0x1100B); // x^16+x^12+x^3+x+1
}

TEST_CASE("pow examples") {
  const Field f(FieldSpec::prime(7));
  // 3^2 = 9 = 2 mod 7, via the reference multiplication
  const auto ref = oracle::Gf::prime(7);
  CHECK(ref.mul(3, 3) == 2);
  CHECK(f.pow(f.element(3), 2) == f.element(2));
  for (const auto& spec : small_fields()) {
    const Field g(spec);
    CHECK(g.pow(g.zero(), 0) == g.one());
    for (std::uint32_t a = 0; a < g.order(); ++a) CHECK(g.pow(g.element(a), 1) == g.element(a));
  }
}

TEST_CASE("enumerate_elements") {
  const Field f7(FieldSpec::prime(7));
  const auto three = enumerate_elements(f7, 3);
  REQUIRE(three.size() == 3);
  CHECK(three[0].value() == 0);
  CHECK(three[1].value() == 1);
  CHECK(three[2].value() == 2);
  const Field f256(FieldSpec::binary(8));
  const auto all = enumerate_elements(f256, 256);
  CHECK(std::set<FieldElement>(all.begin(), all.end()).size() == 256);
  CHECK_THROWS_AS(enumerate_elements(Field(FieldSpec::prime(5)), 6), Error);
}

TEST_CASE("field axioms hold exhaustively on small fields") {
  for (const auto& spec : small_fields()) {
    CAPTURE(spec.to_string());
    const Field f(spec);
    const std::uint32_t q = f.order();
    for (std::uint32_t a = 0; a < q; ++a) {
      const auto A = f.element(a);
      if (a != 0) CHECK(f.mul(f.inv(A), A) == f.one());
      CHECK(f.add(A, f.neg(A)) == f.zero());
      for (std::uint32_t b = 0; b < q; ++b) {
        const auto B = f.element(b);
        CHECK(f.mul(A, B) == f.mul(B, A));
        for (std::uint32_t c = 0; c < q; ++c) {
          const auto C = f.element(c);
          REQUIRE(f.mul(f.mul(A, B), C) == f.mul(A, f.mul(B, C)));
          REQUIRE(f.add(f.add(A, B), C) == f.add(A, f.add(B, C)));
          REQUIRE(f.mul(A, f.add(B, C)) == f.add(f.mul(A, B), f.mul(A, C)));
        }
      }
    }
  }
}

TEST_CASE("multiplication matches carry-less and modular references") {
  for (const auto& spec : {FieldSpec::binary(8), FieldSpec::prime(257), FieldSpec::binary(7), FieldSpec::prime(251)}) {
    CAPTURE(spec.to_string());
    const Field f(spec);
    const auto ref = reference_for(spec);
    for (std::uint32_t a = 0; a < f.order(); ++a) {
      for (std::uint32_t b = 0; b < f.order(); ++b) {
        REQUIRE(f.mul(f.element(a), f.element(b)).value() == ref.mul(a, b));
        REQUIRE(f.add(f.element(a), f.element(b)).value() == ref.add(a, b));
      }
      if (a != 0) REQUIRE(f.inv(f.element(a)).value() == ref.inv(a));
    }
  }
}

TEST_CASE("axioms on sampled triples in the larger fields") {
  std::mt19937_64 rng(11);
  for (const auto& spec : {FieldSpec::binary(8), FieldSpec::prime(257), FieldSpec::binary(16), FieldSpec::prime(65521)}) {
    CAPTURE(spec.to_string());
    const Field f(spec);
    const auto ref = reference_for(spec);
    for (int trial = 0; trial < 20000; ++trial) {
      const auto a = f.element(static_cast<std::uint32_t>(rng() % f.order()));
      const auto b = f.element(static_cast<std::uint32_t>(rng() % f.order()));
      const auto c = f.element(static_cast<std::uint32_t>(rng() % f.order()));
      REQUIRE(f.mul(a, b).value() == ref.mul(a.value(), b.value()));
      REQUIRE(f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c)));
      REQUIRE(f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c)));
      if (!a.is_zero()) REQUIRE(f.mul(a, f.inv(a)) == f.one());
      REQUIRE(f.sub(f.add(a, b), b) == a);
      if (!b.is_zero()) REQUIRE(f.mul(f.div(a, b), b) == a);
    }
    for (int trial = 0; trial < 200; ++trial) {
      const auto a = f.element(static_cast<std::uint32_t>(rng() % f.order()));
      const auto t = rng() % 50;
      REQUIRE(f.pow(a, t).value() == ref.pow(a.value(), t));
    }
  }
}

TEST_CASE("minimal_field") {
  CHECK(minimal_field(7) == FieldSpec::prime(7));
  CHECK(minimal_field(8) == FieldSpec::binary(3));
  CHECK(minimal_field(9) == FieldSpec::prime(11));
  CHECK(minimal_field(48) == FieldSpec::prime(53));
  CHECK(minimal_field(2).order() == 2);
  CHECK_THROWS_AS(minimal_field(70000), Error);
}
