#include <qlgs/nonlinearity.hpp>

#include <qlgs/dual_transform.hpp>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"

using qlgs::G_eval;
using qlgs::NonlinearitySpec;
using qlgs::Rational;
using qlgs::g_eval;
using qlgs::g_prime;

namespace {

// Independent antiderivative for ratio_power(6, 10): g(t) = t^9/(1+t^4),
// so G(t) = t^6/6 - t^2/2 + arctan(t^2)/2.  The closed form cancels
// catastrophically for small t, where the alternating series
// sum (-1)^k t^(10+4k)/(10+4k) converges instead.
double ratio_6_10_G(double t) {
  t = std::abs(t);
  if (t < 0.5) {
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 0; k < 60; ++k) {
      const double term = sign * std::pow(t, 10 + 4 * k) / (10 + 4 * k);
      sum += term;
      if (std::abs(term) < 1e-30 * std::abs(sum)) break;
      sign = -sign;
    }
    return sum;
  }
  const double t2 = t * t;
  return t2 * t2 * t2 / 6.0 - t2 / 2.0 + std::atan(t2) / 2.0;
}

}  // namespace

TEST_CASE("min_power evaluates the smaller signed power branch") {
  const auto spec = NonlinearitySpec::min_power(Rational(5), Rational(7));
  CHECK(g_eval(spec, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(g_eval(spec, 0.5) == doctest::Approx(std::pow(0.5, 6)).epsilon(1e-14));
  CHECK(g_eval(spec, 2.0) == doctest::Approx(std::pow(2.0, 4)).epsilon(1e-14));
  CHECK(g_eval(spec, -3.0) == 0.0);
  CHECK(g_eval(spec, 0.0) == 0.0);
}

TEST_CASE("g is continuous at the branch point and at zero") {
  const auto spec = NonlinearitySpec::min_power(Rational(5), Rational(7));
  CHECK(g_eval(spec, 1.0 - 1e-9) == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(g_eval(spec, 1.0 + 1e-9) == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(std::abs(g_eval(spec, 1e-4)) < 1e-23);

  const auto ratio = NonlinearitySpec::ratio_power(Rational(6), Rational(10));
  CHECK(g_eval(ratio, 1.0 - 1e-9) ==
        doctest::Approx(g_eval(ratio, 1.0 + 1e-9)).epsilon(1e-7));
}

TEST_CASE("min_power antiderivative matches the exact piecewise form") {
  const auto spec = NonlinearitySpec::min_power(Rational(5), Rational(7));
  CHECK(G_eval(spec, 0.0) == 0.0);
  CHECK(G_eval(spec, 1.0) == doctest::Approx(1.0 / 7.0).epsilon(1e-14));
  CHECK(G_eval(spec, 2.0) ==
        doctest::Approx(1.0 / 7.0 + 31.0 / 5.0).epsilon(1e-14));
  CHECK(G_eval(spec, 0.5) ==
        doctest::Approx(std::pow(0.5, 7) / 7.0).epsilon(1e-14));
  // Continuity across the branch point.
  CHECK(G_eval(spec, 1.0 + 1e-9) == doctest::Approx(1.0 / 7.0).epsilon(1e-7));
}

TEST_CASE("single_power has monomial g and G") {
  const auto spec = NonlinearitySpec::single_power(Rational(8));
  CHECK(spec.theta == Rational(4));
  CHECK(g_eval(spec, 2.0) == doctest::Approx(128.0).epsilon(1e-14));
  CHECK(G_eval(spec, 2.0) == doctest::Approx(256.0 / 8.0).epsilon(1e-14));
  CHECK(g_eval(spec, -2.0) == 0.0);
}

TEST_CASE("ratio_power matches its elementary antiderivative") {
  const auto spec = NonlinearitySpec::ratio_power(Rational(6), Rational(10));
  const double t5 = std::pow(10.0, 5);
  CHECK(g_eval(spec, 2.0) ==
        doctest::Approx(std::pow(2.0, 9) / 17.0).epsilon(1e-14));
  CHECK(g_eval(spec, t5) ==
        doctest::Approx(std::pow(t5, 5) / (1.0 + std::pow(t5, -4)))
            .epsilon(1e-14));

  for (double t : {1e-6, 1e-3, 0.1, 0.5, 1.0, 2.0, 10.0, 100.0, 1e4, 1e6}) {
    const double mine = G_eval(spec, t);
    const double oracle = ratio_6_10_G(t);
    CHECK(std::abs(mine - oracle) <= 1e-10 * std::abs(oracle) + 1e-18);
  }
}

TEST_CASE("g_prime agrees with central differences away from kinks") {
  const std::vector<NonlinearitySpec> catalog = {
      NonlinearitySpec::min_power(Rational(5), Rational(7)),
      NonlinearitySpec::ratio_power(Rational(6), Rational(10)),
      NonlinearitySpec::single_power(Rational(8)),
  };
  for (const auto& spec : catalog) {
    for (double t : {0.05, 0.3, 0.8, 1.5, 3.0, 10.0}) {
      const double h = 1e-6 * std::max(1.0, t);
      const double fd = (g_eval(spec, t + h) - g_eval(spec, t - h)) / (2 * h);
      const double exact = g_prime(spec, t);
      CHECK(std::abs(fd - exact) <= 1e-6 * (1.0 + std::abs(exact)));
    }
    CHECK(g_prime(spec, -1.0) == 0.0);
  }
}

TEST_CASE("superquadraticity holds on the standard sweep") {
  const std::vector<NonlinearitySpec> catalog = {
      NonlinearitySpec::min_power(Rational(5), Rational(7)),
      NonlinearitySpec::min_power(Rational(9, 2), Rational(13, 2)),
      NonlinearitySpec::ratio_power(Rational(6), Rational(10)),
      NonlinearitySpec::single_power(Rational(8)),
      NonlinearitySpec::min_power(Rational(5), Rational(7))
          .with_theta(Rational(21, 10)),
  };
  for (const auto& base : catalog) {
    for (const auto& spec : {base, base.untruncated()}) {
      const double theta = qlgs::to_double(spec.theta);
      for (double t : qlgs::DualTransform::standard_sweep()) {
        const double G = G_eval(spec, t);
        const double gt = g_eval(spec, t) * t;
        REQUIRE(G >= 0.0);
        REQUIRE(2.0 * theta * G <= gt + 1e-10 * (1.0 + gt));
      }
    }
  }
}

TEST_CASE("double-power envelope holds with constant one") {
  const auto min57 = NonlinearitySpec::min_power(Rational(5), Rational(7));
  const auto single = NonlinearitySpec::single_power(Rational(8));
  const auto ratio = NonlinearitySpec::ratio_power(Rational(6), Rational(10));

  for (double t : qlgs::DualTransform::standard_sweep()) {
    if (t == 0.0) continue;
    const double a = std::abs(t);
    const double env57 = std::min(std::pow(a, 4), std::pow(a, 6));
    if (std::isfinite(env57) && env57 > 0.0) {
      REQUIRE(std::abs(g_eval(min57, t)) <= env57 * (1.0 + 1e-12));
    }
  }

  CHECK(qlgs::empirical_envelope_constant(min57) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(qlgs::empirical_envelope_constant(single) ==
        doctest::Approx(1.0).epsilon(1e-12));
  // Recorded, not asserted tight: the ratio kind sits strictly inside.
  const double ratio_c = qlgs::empirical_envelope_constant(ratio);
  CHECK(ratio_c <= 1.0 + 1e-12);
  CHECK(ratio_c > 0.9);
}

TEST_CASE("every catalog nonlinearity is positive somewhere") {
  for (const auto& spec : {
           NonlinearitySpec::min_power(Rational(5), Rational(7)),
           NonlinearitySpec::ratio_power(Rational(6), Rational(10)),
           NonlinearitySpec::single_power(Rational(8)),
       }) {
    CHECK(G_eval(spec, 1.0) > 0.0);
  }
}

TEST_CASE("validation rejects inconsistent exponents") {
  CHECK_THROWS_AS(NonlinearitySpec::min_power(Rational(7), Rational(5)),
                  std::invalid_argument);
  // Default theta = q1/2 = 2 fails the strict theta > 2 requirement.
  CHECK_THROWS_AS(NonlinearitySpec::min_power(Rational(4), Rational(8)),
                  std::invalid_argument);
  CHECK_THROWS_AS(NonlinearitySpec::single_power(Rational(4)),
                  std::invalid_argument);
  const auto spec = NonlinearitySpec::min_power(Rational(5), Rational(7));
  CHECK_THROWS_AS(spec.with_theta(Rational(3)), std::invalid_argument);
  CHECK_THROWS_AS(spec.with_theta(Rational(2)), std::invalid_argument);
  CHECK_NOTHROW(spec.with_theta(Rational(5, 2)));
  CHECK_NOTHROW(NonlinearitySpec::zero().validate());
}

TEST_CASE("zero kind is identically zero") {
  const auto spec = NonlinearitySpec::zero();
  CHECK(spec.is_zero());
  for (double t : {-2.0, 0.0, 0.5, 3.0}) {
    CHECK(g_eval(spec, t) == 0.0);
    CHECK(g_prime(spec, t) == 0.0);
    CHECK(G_eval(spec, t) == 0.0);
  }
}

TEST_CASE("untruncated specs extend oddly") {
  const auto spec =
      NonlinearitySpec::min_power(Rational(5), Rational(7)).untruncated();
  CHECK(g_eval(spec, -0.5) ==
        doctest::Approx(-std::pow(0.5, 6)).epsilon(1e-14));
  CHECK(g_eval(spec, -2.0) ==
        doctest::Approx(-std::pow(2.0, 4)).epsilon(1e-14));
  CHECK(G_eval(spec, -2.0) == doctest::Approx(G_eval(spec, 2.0)));
  CHECK(g_prime(spec, -2.0) == doctest::Approx(g_prime(spec, 2.0)));
}

TEST_CASE("default theta is half the smaller exponent") {
  CHECK(NonlinearitySpec::min_power(Rational(5), Rational(7)).theta ==
        Rational(5, 2));
  CHECK(NonlinearitySpec::ratio_power(Rational(6), Rational(10)).theta ==
        Rational(3));
  const auto described =
      NonlinearitySpec::min_power(Rational(5), Rational(7)).describe();
  CHECK(described.find("min_power") != std::string::npos);
  CHECK(described.find("theta=5/2") != std::string::npos);
}
