#pragma once

#include <utility>
#include <vector>

namespace qlgs {

// Change of variables for the dual formulation: f solves the Cauchy problem
//   f'(t) = 1 / sqrt(1 + 2 f(t)^2),  f(0) = 0,
// and is evaluated as the inverse of its closed-form antiderivative
//   F(s) = s*sqrt(1+2 s^2)/2 + asinh(sqrt(2) s)/(2 sqrt(2)),  F'(s) = sqrt(1+2 s^2).
// f is odd, strictly increasing and surjective; F' >= 1 makes the safeguarded
// Newton inversion globally convergent.
class DualTransform {
 public:
  explicit DualTransform(double inversion_tol = 1e-12);

  double f(double t) const;
  double f_prime(double t) const;   // 1/sqrt(1 + 2 f(t)^2), in (0,1]
  double f_second(double t) const;  // -2 f f'^4
  double f_inverse(double w) const; // closed-form F(w)

  struct Value {
    double w;   // f(t)
    double fp;  // f'(t)
  };
  // One inversion for both values; the hot path of every energy quadrature.
  Value f_with_prime(double t) const;
  static double prime_from_value(double w);

  double inversion_tolerance() const { return tol_; }

  // Empirical constants over the standard sweep (the ones the two-sided bound
  // statements leave unspecified).  No optimality claimed.
  double lower_bound_constant() const;                 // largest C1: |f| >= C1|t| (|t|<=1), C1 sqrt|t| (|t|>=1)
  std::pair<double, double> two_sided_constants() const;  // (c1, c2): |t| <= c1|f| + c2 f^2
  double doubling_constant() const;                    // sup f(2t)^2/f(t)^2, finite and <= 4

  // 10^4 log-spaced magnitudes up to 1e6, mirrored, plus 0.
  static const std::vector<double>& standard_sweep();

 private:
  double invert(double t) const;  // t >= 0
  double tol_;
};

}  // namespace qlgs
