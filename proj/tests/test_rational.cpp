#include "doctest.h"
#include "qlgs/rational.hpp"

using qlgs::Rational;

TEST_CASE("parse integer and fraction forms") {
  CHECK(qlgs::parse_rational("3") == Rational(3));
  CHECK(qlgs::parse_rational("-1/2") == Rational(-1, 2));
  CHECK(qlgs::parse_rational("+7/3") == Rational(7, 3));
  CHECK(qlgs::parse_rational(" 6/4 ") == Rational(3, 2));
}

TEST_CASE("parse exact decimals") {
  CHECK(qlgs::parse_rational("0.25") == Rational(1, 4));
  CHECK(qlgs::parse_rational("-0.5") == Rational(-1, 2));
  CHECK(qlgs::parse_rational("2.") == Rational(2));
  CHECK(qlgs::parse_rational("1.75") == Rational(7, 4));
}

TEST_CASE("reject malformed input") {
  CHECK_FALSE(qlgs::parse_rational("").has_value());
  CHECK_FALSE(qlgs::parse_rational("1/0").has_value());
  CHECK_FALSE(qlgs::parse_rational("a/b").has_value());
  CHECK_FALSE(qlgs::parse_rational("1.2.3").has_value());
}

TEST_CASE("string round trip") {
  CHECK(qlgs::to_string(Rational(-5, 3)) == "-5/3");
  CHECK(qlgs::to_string(Rational(4)) == "4");
  CHECK(qlgs::to_double(Rational(1, 4)) == doctest::Approx(0.25));
}
