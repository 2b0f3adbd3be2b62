#pragma once

#include <qlgs/rational.hpp>

#include <string>

namespace qlgs {

// Double-power nonlinearity catalog for the right-hand side K(|x|) g(w).
// All kinds grow like |t|^{q2-1} near zero and |t|^{q1-1} at infinity,
// with q1 <= q2.  theta is the superquadraticity exponent entering the
// Ambrosetti-Rabinowitz condition 2*theta*G(t) <= g(t) t.
struct NonlinearitySpec {
  enum class Kind { min_power, ratio_power, single_power, zero };

  // Factories validate on construction; see validate().
  static NonlinearitySpec min_power(Rational q1, Rational q2);
  static NonlinearitySpec ratio_power(Rational q1, Rational q2);
  static NonlinearitySpec single_power(Rational q);
  // Degenerate g == 0, used to exercise solver failure paths.
  static NonlinearitySpec zero();

  Kind kind = Kind::zero;
  Rational q1{0};
  Rational q2{0};
  // Defaults to min{q1, q2} / 2 in the factories.
  Rational theta{0};
  bool truncated_negative = true;

  NonlinearitySpec with_theta(Rational th) const;
  NonlinearitySpec untruncated() const;

  bool is_zero() const { return kind == Kind::zero; }
  std::string describe() const;

  // Enforces q1 <= q2, theta > 2 and 2*theta <= q1 (no-op for the zero
  // kind).  Throws std::invalid_argument naming the violated constraint.
  void validate() const;
};

double g_eval(const NonlinearitySpec& spec, double t);
double g_prime(const NonlinearitySpec& spec, double t);

// Antiderivative with G(0) = 0.  Closed form for min_power/single_power;
// adaptive quadrature against a cached anchor table for ratio_power.
double G_eval(const NonlinearitySpec& spec, double t);

// sup |g(t)| / min{|t|^{q1-1}, |t|^{q2-1}} over the standard sweep.
// Exactly 1 for min_power and single_power; recorded for ratio_power.
double empirical_envelope_constant(const NonlinearitySpec& spec);

}  // namespace qlgs
