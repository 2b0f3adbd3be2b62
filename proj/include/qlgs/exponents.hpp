#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qlgs/rational.hpp"

namespace qlgs {

// Power envelope for a weight near one end of the half-line: K(r) is
// comparable to r^alpha * V(r)^beta on (0, radius] or [radius, inf).
// alpha_any marks super-polynomial smallness: the bound holds for every
// alpha, so the alpha field is ignored.
struct Envelope {
  Rational alpha;
  Rational beta;        // must lie in [0,1]
  double radius = 1.0;  // matching radius, > 0
  bool alpha_any = false;
};

// Open interval (lo, hi) of rationals; empty means no admissible value;
// unbounded_above means (lo, +inf) and hi is ignored.
struct OpenInterval {
  Rational lo;
  Rational hi;
  bool empty = true;
  bool unbounded_above = false;
  bool contains(const Rational& q) const {
    return !empty && lo < q && (unbounded_above || q < hi);
  }
};

std::string to_string(const OpenInterval& iv, bool space_after_comma = true);

Rational alpha_star(const Rational& beta, int N);
Rational q0_star(const Rational& alpha, const Rational& beta, int N);
Rational q_inf_star(const Rational& alpha, const Rational& beta, int N);

OpenInterval q1_range(const Envelope& env0, int N);
Rational q2_lower_bound(const Envelope& envInf, int N);

// Multi-envelope variants scan the supplied finite set and keep the most
// permissive envelope (widest interval, weakest lower bound).
OpenInterval q1_range(const std::vector<Envelope>& env0, int N, std::size_t* chosen = nullptr);
Rational q2_lower_bound(const std::vector<Envelope>& envInf, int N, std::size_t* chosen = nullptr);

Rational delta_rate_zero(const Rational& q1, const Envelope& env0, int N);
Rational delta_rate_infinity(const Rational& q2, const Envelope& envInf, int N);

struct AdmissibilityReport {
  int N = 3;
  Rational theta;
  Rational q1;     // normalized so q1 <= q2
  Rational q2;
  bool swapped = false;       // inputs arrived with q1 > q2
  bool single_power = false;  // q1 == q2

  Rational alpha_star_0;
  bool q0_star_infinite = false;  // super-polynomial zero-end envelope
  Rational q0_star;               // meaningful when !q0_star_infinite
  Rational q_inf_star;
  OpenInterval q1_interval;   // admissible q1 from the zero-end envelope alone
  Rational q2_lower;          // strict lower bound for q2
  OpenInterval q1_existence;  // q1_interval cut to q1 > 4 (growth hypothesis)
  OpenInterval q_single;      // admissible q when q1 == q2

  std::optional<Rational> delta_zero;      // rate at the chosen q1, when defined
  std::optional<Rational> delta_infinity;  // rate at the chosen q2, when defined

  bool existence_ok = false;
  std::vector<std::string> reasons;  // first entry is the headline failure
  std::string message;               // one-line human summary

  Envelope env0_used;
  Envelope envInf_used;
};

AdmissibilityReport existence_check(const std::vector<Envelope>& env0,
                                    const std::vector<Envelope>& envInf, const Rational& q1,
                                    const Rational& q2, const Rational& theta, int N);

AdmissibilityReport existence_check(const Envelope& env0, const Envelope& envInf,
                                    const Rational& q1, const Rational& q2, const Rational& theta,
                                    int N);

}  // namespace qlgs
