#include "qlgs/dual_transform.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qlgs {

namespace {

const double kSqrt2 = std::sqrt(2.0);
const double kRoot4of2 = std::pow(2.0, 0.25);

double F(double w) {
  return w * std::sqrt(1.0 + 2.0 * w * w) / 2.0 + std::asinh(kSqrt2 * w) / (2.0 * kSqrt2);
}

double F_prime(double w) { return std::sqrt(1.0 + 2.0 * w * w); }

void require_finite(double x) {
  if (!std::isfinite(x)) throw std::domain_error("dual transform: non-finite argument");
}

}  // namespace

DualTransform::DualTransform(double inversion_tol) : tol_(inversion_tol) {
  if (!(inversion_tol > 0)) throw std::domain_error("dual transform: tolerance must be positive");
}

double DualTransform::f_inverse(double w) const {
  require_finite(w);
  return F(w);
}

// Solve F(w) = t for t >= 0.  F is convex increasing there, so Newton started
// at or above the root descends monotonically; the bracket is a safety net.
double DualTransform::invert(double t) const {
  if (t == 0.0) return 0.0;

  double w;
  if (t < 0.5) {
    w = t * (1.0 - t * t / 3.0);  // series near 0
  } else if (t > 4.0) {
    // from t ~ w^2/sqrt(2) + 1/(4 sqrt 2) + ln(2 sqrt 2 w)/(2 sqrt 2)
    double wt = std::sqrt(kSqrt2 * t);
    double s = kSqrt2 * t - 0.25 - 0.5 * std::log(2.0 * kSqrt2 * wt);
    w = std::sqrt(std::max(s, 0.25 * t));
  } else {
    w = std::min(t, kRoot4of2 * std::sqrt(t));  // upper bound on the root
  }

  double lo = 0.0, hi = std::max(w, std::min(t, kRoot4of2 * std::sqrt(t)));
  while (F(hi) < t) hi *= 2.0;

  const double eps = tol_ * (1.0 + t);
  for (int it = 0; it < 80; ++it) {
    double err = F(w) - t;
    if (std::abs(err) <= eps) return w;
    if (err > 0) hi = std::min(hi, w); else lo = std::max(lo, w);
    double step = err / F_prime(w);
    double next = w - step;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);  // bisection fallback
    w = next;
  }
  return w;
}

double DualTransform::f(double t) const {
  require_finite(t);
  return t >= 0 ? invert(t) : -invert(-t);
}

double DualTransform::prime_from_value(double w) { return 1.0 / std::sqrt(1.0 + 2.0 * w * w); }

double DualTransform::f_prime(double t) const { return prime_from_value(f(t)); }

double DualTransform::f_second(double t) const {
  double w = f(t);
  double fp = prime_from_value(w);
  double fp2 = fp * fp;
  return -2.0 * w * fp2 * fp2;
}

DualTransform::Value DualTransform::f_with_prime(double t) const {
  double w = f(t);
  return {w, prime_from_value(w)};
}

const std::vector<double>& DualTransform::standard_sweep() {
  static const std::vector<double> sweep = [] {
    std::vector<double> s;
    const int half = 5000;
    s.reserve(2 * half + 1);
    const double lo = 1e-8, hi = 1e6;
    const double step = std::log(hi / lo) / (half - 1);
    for (int i = 0; i < half; ++i) {
      double t = lo * std::exp(step * i);
      s.push_back(t);
      s.push_back(-t);
    }
    s.push_back(0.0);
    std::sort(s.begin(), s.end());
    return s;
  }();
  return sweep;
}

double DualTransform::lower_bound_constant() const {
  double c1 = f(1.0);  // both ratio families are extremal at t=1
  for (double t : standard_sweep()) {
    if (t <= 0) continue;
    double w = f(t);
    double ratio = t <= 1.0 ? w / t : w / std::sqrt(t);
    c1 = std::min(c1, ratio);
  }
  return c1;
}

std::pair<double, double> DualTransform::two_sided_constants() const {
  double c = lower_bound_constant();
  double c1 = 1.0 / c, c2 = 1.0 / (c * c);
  for (double t : standard_sweep()) {  // defensive: the sweep must confirm the pair
    if (t == 0) continue;
    double w = std::abs(f(t));
    if (std::abs(t) > c1 * w + c2 * w * w) {
      c2 *= 1.0 + 1e-12;
    }
  }
  return {c1, c2};
}

double DualTransform::doubling_constant() const {
  double sup = 0.0;
  for (double t : standard_sweep()) {
    if (t <= 0) continue;
    double a = f(2.0 * t), b = f(t);
    sup = std::max(sup, (a * a) / (b * b));
  }
  return sup;
}

}  // namespace qlgs
