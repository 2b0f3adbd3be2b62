#include "doctest.h"
#include "qlgs/potentials.hpp"

#include <cmath>
#include <vector>

using namespace qlgs;

namespace {
const std::vector<double> kGrid = {1e-6, 1e-3, 0.1, 0.5, 1.0, 2.0, 10.0, 300.0};
}

TEST_CASE("evaluation matches hand-written forms") {
  auto check = [](const char* text, auto fn) {
    Potential p = Potential::parse(text);
    for (double r : kGrid) {
      double want = fn(r);
      CHECK(p.eval(r) == doctest::Approx(want).epsilon(1e-14));
    }
  };
  check("r^-2", [](double r) { return 1.0 / (r * r); });
  check("max(r^6, r^9)", [](double r) {
    return std::max(std::pow(r, 6), std::pow(r, 9));
  });
  check("max(r^(-1/2), r^(-1/3))", [](double r) {
    return std::max(std::pow(r, -0.5), std::pow(r, -1.0 / 3.0));
  });
  check("min(r^3, 1)", [](double r) { return std::min(r * r * r, 1.0); });
  check("r^3 * exp(r)", [](double r) { return r * r * r * std::exp(r); });
  check("exp(-1/r)", [](double r) { return std::exp(-1.0 / r); });
  check("r * exp(-1/r)", [](double r) { return r * std::exp(-1.0 / r); });
  check("1 + r^2", [](double r) { return 1.0 + r * r; });
  check("min(r, 1, r^2)", [](double r) { return std::min({r, 1.0, r * r}); });
  check("exp(1/2*r)", [](double r) { return std::exp(0.5 * r); });
  check("2.5", [](double) { return 2.5; });
}

TEST_CASE("overflow clamps instead of poisoning products") {
  Potential p = Potential::parse("exp(2*r)");
  CHECK(p.clamped_at(1000.0));
  CHECK(p.eval(1000.0) == 1e300);
  CHECK(p.eval(1000.0) * 0.0 == 0.0);
  CHECK_FALSE(p.clamped_at(10.0));
  // underflow is harmless
  CHECK(Potential::parse("exp(-1/r)").eval(1e-6) == 0.0);
}

TEST_CASE("parse errors carry the offset") {
  auto offset_of = [](const char* text) {
    try {
      Potential::parse(text);
    } catch (const ExprParseError& e) {
      return static_cast<long>(e.offset);
    }
    return -1L;
  };
  CHECK(offset_of("") == 0);
  CHECK(offset_of("r^") >= 2);
  CHECK(offset_of("min(r^3)") >= 7);
  CHECK(offset_of("foo(r)") == 0);
  CHECK(offset_of("r^3 r") == 4);
  CHECK(offset_of("exp(2r)") >= 5);
  CHECK(offset_of("r^(1/0)") >= 3);
  CHECK(offset_of("r -2") >= 2);  // binary minus is not part of the grammar
}

TEST_CASE("leading behavior at both ends") {
  auto lead = [](const char* text) {
    Potential p = Potential::parse(text);
    return std::pair{p.leading_zero(), p.leading_infinity()};
  };
  {
    auto [z, i] = lead("r^-2");
    CHECK(z.power == Rational(-2));
    CHECK(z.rate == Rational(0));
    CHECK(i.power == Rational(-2));
  }
  {
    auto [z, i] = lead("max(r^6, r^9)");
    CHECK(z.power == Rational(6));   // near zero the smaller exponent dominates a max
    CHECK(i.power == Rational(9));
  }
  {
    auto [z, i] = lead("min(r^3, 1)");
    CHECK(z.power == Rational(3));
    CHECK(i.power == Rational(0));
  }
  {
    auto [z, i] = lead("r^3 * exp(r)");
    CHECK(z.power == Rational(3));
    CHECK(z.rate == Rational(0));
    CHECK(i.power == Rational(3));
    CHECK(i.rate == Rational(1));
  }
  {
    auto [z, i] = lead("exp(-1/r)");
    CHECK(z.rate == Rational(-1));
    CHECK(i.rate == Rational(0));
    CHECK(i.power == Rational(0));
  }
  {
    auto [z, i] = lead("1 + r^2");
    CHECK(z.power == Rational(0));
    CHECK(i.power == Rational(2));
  }
  {
    auto [z, i] = lead("max(r^(-1/2), r^(-1/3))");
    CHECK(z.power == Rational(-1, 2));
    CHECK(i.power == Rational(-1, 3));
  }
}

TEST_CASE("envelope suggestion by leading-term analysis") {
  Potential V = Potential::parse("r^-2");
  {
    std::vector<Envelope> at0 = suggest_envelopes_zero(Potential::parse("max(r^6, r^9)"), V);
    REQUIRE(at0.size() == 3);
    CHECK(at0[0].beta == Rational(0));
    CHECK(at0[0].alpha == Rational(6));
    CHECK(at0[1].beta == Rational(1, 2));
    CHECK(at0[1].alpha == Rational(7));
    CHECK(at0[2].beta == Rational(1));
    CHECK(at0[2].alpha == Rational(8));
    std::vector<Envelope> atI = suggest_envelopes_infinity(Potential::parse("max(r^6, r^9)"), V);
    REQUIRE(atI.size() == 3);
    CHECK(atI[0].alpha == Rational(9));
  }
  {
    // super-polynomial vanishing at zero
    std::vector<Envelope> at0 = suggest_envelopes_zero(Potential::parse("exp(-1/r)"), V);
    REQUIRE(at0.size() == 3);
    for (const auto& e : at0) CHECK(e.alpha_any);
    std::vector<Envelope> atI = suggest_envelopes_infinity(Potential::parse("exp(-1/r)"), V);
    REQUIRE(atI.size() == 3);
    CHECK_FALSE(atI[0].alpha_any);
    CHECK(atI[0].alpha == Rational(0));
  }
  {
    // exponential growth needs the matching V power
    Potential Vexp = Potential::parse("exp(2*r)");
    Potential K = Potential::parse("r^3 * exp(r)");
    std::vector<Envelope> atI = suggest_envelopes_infinity(K, Vexp);
    REQUIRE(atI.size() == 2);
    CHECK(atI[0].beta == Rational(1, 2));
    CHECK(atI[0].alpha == Rational(3));
    CHECK_FALSE(atI[0].alpha_any);
    CHECK(atI[1].beta == Rational(1));
    CHECK(atI[1].alpha_any);
    // at zero both factors are regular
    std::vector<Envelope> at0 = suggest_envelopes_zero(K, Vexp);
    REQUIRE(at0.size() == 3);
    CHECK(at0[0].alpha == Rational(3));
    CHECK(at0[0].beta == Rational(0));
  }
  {
    // far-end product envelope: K = r * exp(-1/r) against V = r^-2
    std::vector<Envelope> atI =
        suggest_envelopes_infinity(Potential::parse("r * exp(-1/r)"), V);
    REQUIRE(atI.size() == 3);
    CHECK(atI[2].beta == Rational(1));
    CHECK(atI[2].alpha == Rational(3));
  }
}

TEST_CASE("hypothesis screening") {
  CHECK(singular_bound_constant(Potential::parse("r^-2")) == doctest::Approx(1.0));
  CHECK(singular_bound_constant(Potential::parse("exp(2*r)")) ==
        doctest::Approx(std::exp(2.0)).epsilon(1e-12));
  CHECK(singular_bound_constant(Potential::parse("1")) == doctest::Approx(1.0));

  CHECK(Potential::parse("min(r^3, 1)").strictly_positive());
  CHECK(Potential::parse("r^-2").strictly_positive());
  CHECK_FALSE(Potential::parse("0").strictly_positive());
  CHECK(Potential::parse("0").nonnegative());
  CHECK(Potential::parse("0").is_zero());
  CHECK(Potential().is_zero());
  CHECK(Potential().eval(2.0) == 0.0);
}
