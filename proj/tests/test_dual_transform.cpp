#include "doctest.h"
#include "qlgs/dual_transform.hpp"

#include <cmath>
#include <functional>

using qlgs::DualTransform;

namespace {

// Independent quadrature oracle for the inverse map: F(s) = integral of
// sqrt(1 + 2 x^2) on [0, s].  Adaptive Simpson, tolerance-driven recursion.
double simpson(const std::function<double(double)>& fn, double a, double b) {
  double c = 0.5 * (a + b);
  return (b - a) / 6.0 * (fn(a) + 4.0 * fn(c) + fn(b));
}

double adaptive(const std::function<double(double)>& fn, double a, double b, double whole,
                double tol, int depth) {
  double c = 0.5 * (a + b);
  double left = simpson(fn, a, c), right = simpson(fn, c, b);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive(fn, a, c, left, tol / 2, depth - 1) +
         adaptive(fn, c, b, right, tol / 2, depth - 1);
}

double F_oracle(double s) {
  auto fn = [](double x) { return std::sqrt(1.0 + 2.0 * x * x); };
  return adaptive(fn, 0.0, s, simpson(fn, 0.0, s), 1e-14, 40);
}

}  // namespace

TEST_CASE("inverse map agrees with quadrature oracle") {
  DualTransform dt;
  for (double s : {0.1, 0.5, 1.0, 2.0, 7.5, 30.0}) {
    CHECK(dt.f_inverse(s) == doctest::Approx(F_oracle(s)).epsilon(1e-12));
  }
  // frozen oracle values
  CHECK(dt.f_inverse(1.0) == doctest::Approx(1.2712738985228155).epsilon(1e-13));
  CHECK(std::abs(dt.f_inverse(1.0) - 1.27129) <= 2e-5);
  CHECK(dt.f_inverse(0.0) == 0.0);
  CHECK(dt.f_inverse(-1.0) == doctest::Approx(-1.2712738985228155).epsilon(1e-13));
}

TEST_CASE("forward map inverts the integral") {
  DualTransform dt;
  CHECK(dt.f(1.2712738985228155) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(dt.f(1.271290) - 1.0) <= 2e-5);
  CHECK(dt.f(1.0) == doctest::Approx(0.8344247414832793).epsilon(1e-12));
  CHECK(dt.f(0.0) == 0.0);
}

TEST_CASE("round trip across the sweep") {
  DualTransform dt;
  for (double t : DualTransform::standard_sweep()) {
    double w = dt.f(t);
    CHECK(std::abs(dt.f_inverse(w) - t) <= 1e-10 * (1.0 + std::abs(t)));
  }
}

TEST_CASE("derivative identities") {
  DualTransform dt;
  for (double t : {1e-6, 0.01, 0.3, 1.0, 4.0, 100.0, 1e5}) {
    auto [w, fp] = dt.f_with_prime(t);
    CHECK(fp == doctest::Approx(1.0 / std::sqrt(1.0 + 2.0 * w * w)).epsilon(1e-14));
    // finite-difference check of f' and f''
    double h = 1e-5 * (1.0 + t);
    double fd1 = (dt.f(t + h) - dt.f(t - h)) / (2.0 * h);
    double fd2 = (dt.f(t + h) - 2.0 * w + dt.f(t - h)) / (h * h);
    CHECK(fd1 == doctest::Approx(dt.f_prime(t)).epsilon(1e-6));
    CHECK(fd2 == doctest::Approx(dt.f_second(t)).epsilon(2e-3));
  }
}

TEST_CASE("odd symmetry and monotonicity") {
  DualTransform dt;
  double prev = -1e18;
  for (double t : DualTransform::standard_sweep()) {
    double w = dt.f(t);
    CHECK(w > prev);
    prev = w;
    CHECK(dt.f(-t) == doctest::Approx(-w).epsilon(1e-15));
  }
}

TEST_CASE("growth bounds") {
  DualTransform dt;
  const double root4of2 = std::pow(2.0, 0.25);
  for (double t : DualTransform::standard_sweep()) {
    if (t < 0) continue;
    double w = dt.f(t);
    CHECK(w <= t * (1.0 + 1e-14));
    CHECK(w <= root4of2 * std::sqrt(t) * (1.0 + 1e-14));
    CHECK(dt.f_prime(t) <= 1.0);
    CHECK(dt.f_prime(t) > 0.0);
  }
  // asymptotic regimes
  CHECK(dt.f(1e-7) / 1e-7 == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(dt.f(1e8) / std::sqrt(1e8) == doctest::Approx(root4of2).epsilon(1e-3));
  double t = 1e6;
  CHECK(dt.f(t) * dt.f_prime(t) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-4));
}

TEST_CASE("half slope bound: f/2 <= t f' <= f for t >= 0") {
  DualTransform dt;
  for (double t : DualTransform::standard_sweep()) {
    if (t <= 0) continue;
    auto [w, fp] = dt.f_with_prime(t);
    CHECK(t * fp >= 0.5 * w * (1.0 - 1e-12));
    CHECK(t * fp <= w * (1.0 + 1e-12));
  }
}

TEST_CASE("lower bound constant and two sided control") {
  DualTransform dt;
  double c1 = dt.lower_bound_constant();
  CHECK(c1 == doctest::Approx(0.8344247414832793).epsilon(1e-12));  // attained at t = 1
  for (double t : DualTransform::standard_sweep()) {
    if (t <= 0) continue;
    double w = dt.f(t);
    double bound = t <= 1.0 ? c1 * t : c1 * std::sqrt(t);
    CHECK(w >= bound * (1.0 - 1e-13));
  }
  auto [a, b] = dt.two_sided_constants();
  for (double t : DualTransform::standard_sweep()) {
    double w = std::abs(dt.f(t));
    CHECK(std::abs(t) <= a * w + b * w * w + 1e-14);
  }
}

TEST_CASE("product bound and convexity of the square") {
  DualTransform dt;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (double t : DualTransform::standard_sweep()) {
    CHECK(std::abs(dt.f(t) * dt.f_prime(t)) <= inv_sqrt2 * (1.0 + 1e-14));
  }
  // midpoint convexity of t -> f(t)^2 on positives
  auto sq = [&](double t) { double w = dt.f(t); return w * w; };
  for (double t : {0.01, 0.1, 0.5, 1.0, 3.0, 10.0, 1e3}) {
    double mid = sq(1.5 * t);
    CHECK(mid < 0.5 * (sq(t) + sq(2.0 * t)));
  }
}

TEST_CASE("doubling constant stays below 4") {
  DualTransform dt;
  double c = dt.doubling_constant();
  CHECK(c > 1.0);
  CHECK(c <= 4.0);
  for (double t : {1e-6, 0.1, 1.0, 50.0, 1e5}) {
    double a = dt.f(2.0 * t), b = dt.f(t);
    CHECK(a * a <= c * b * b * (1.0 + 1e-13));
  }
}

TEST_CASE("inversion tolerance is honored") {
  DualTransform tight(1e-14);
  DualTransform loose(1e-6);
  CHECK(tight.inversion_tolerance() == 1e-14);
  CHECK(loose.inversion_tolerance() == 1e-6);
  for (double t : {0.3, 1.0, 12.0}) {
    CHECK(std::abs(tight.f_inverse(tight.f(t)) - t) <= 1e-13 * (1.0 + t));
  }
  CHECK_THROWS(DualTransform(0.0));
  CHECK_THROWS(DualTransform(-1.0));
}
