#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qlgs/exponents.hpp"
#include "qlgs/rational.hpp"

namespace qlgs {

struct ExprParseError : std::invalid_argument {
  ExprParseError(const std::string& what, std::size_t offset)
      : std::invalid_argument(what), offset(offset) {}
  std::size_t offset;  // 0-based position in the expression text
};

// Leading behavior of a weight at one end of (0, inf):
//   toward infinity, value ~ coeff * r^power * exp(rate * r)
//   toward zero,     value ~ coeff * r^power * exp(rate / r)
struct Leading {
  Rational power;
  Rational rate;
  double coeff = 1.0;
};

struct Expr;

// Radial weight given by an expression over
// {constant, r^a, exp(c*r), exp(c/r), min, max, product, sum}.
class Potential {
 public:
  Potential() = default;  // identically zero
  static Potential parse(std::string_view text);  // throws ExprParseError
  static Potential constant(double c);

  // evaluation clamps at 1e300 so downstream products with 0 stay 0
  double eval(double r) const;
  bool clamped_at(double r) const;

  bool is_zero() const;               // no expression or the constant 0
  bool strictly_positive() const;     // structural: every constant > 0
  bool nonnegative() const;           // structural: every constant >= 0

  Leading leading_zero() const;
  Leading leading_infinity() const;

  // radii in (lo, hi) where a min/max switches branch; the weight stays
  // continuous there but generically loses C^1, which residual scans that
  // assume local smoothness need to step around
  std::vector<double> kink_radii(double lo, double hi) const;

  const std::string& text() const { return text_; }

  // envelopes declared in the configuration (may be empty)
  std::vector<Envelope> env_zero;
  std::vector<Envelope> env_infinity;

 private:
  std::shared_ptr<const Expr> root_;
  std::string text_;
};

// max over a log grid on (0,1) of V(r) * r^2; finite for admissible V
double singular_bound_constant(const Potential& V, int samples = 200);

// candidate envelopes for K relative to V at one end, one per beta in
// {0, 1/2, 1} where the combined growth admits a power bound
std::vector<Envelope> suggest_envelopes_zero(const Potential& K, const Potential& V);
std::vector<Envelope> suggest_envelopes_infinity(const Potential& K, const Potential& V);

}  // namespace qlgs
