#include "qlgs/exponents.hpp"

#include <algorithm>
#include <stdexcept>

namespace qlgs {

namespace {

void require_beta(const Rational& beta) {
  if (beta < Rational(0) || beta > Rational(1))
    throw std::domain_error("envelope beta must lie in [0,1]");
}

void require_dimension(int N) {
  if (N < 3) throw std::domain_error("dimension must be at least 3");
}

// true when a is a strictly more permissive zero-end interval than b
bool better_interval(const OpenInterval& a, const OpenInterval& b) {
  if (b.empty) return !a.empty;
  if (a.empty) return false;
  if (a.unbounded_above != b.unbounded_above) return a.unbounded_above;
  if (!a.unbounded_above && a.hi != b.hi) return a.hi > b.hi;
  return a.lo < b.lo;
}

}  // namespace

std::string to_string(const OpenInterval& iv, bool space_after_comma) {
  if (iv.empty) return "(empty)";
  const char* sep = space_after_comma ? ", " : ",";
  std::string hi = iv.unbounded_above ? "inf" : to_string(iv.hi);
  return "(" + to_string(iv.lo) + sep + hi + ")";
}

Rational alpha_star(const Rational& beta, int N) {
  require_beta(beta);
  require_dimension(N);
  Rational a = beta * Rational(N + 2, 2) - Rational(N + 2, 2);  // (N+2)(beta-1)/2
  Rational b = beta * Rational(3 * N - 2, 2) - Rational(N);
  return std::max(a, b);
}

Rational q0_star(const Rational& alpha, const Rational& beta, int N) {
  require_dimension(N);
  return (Rational(2) * alpha + Rational(2 * N) - beta * Rational(N + 2)) / Rational(N - 2);
}

Rational q_inf_star(const Rational& alpha, const Rational& beta, int N) {
  require_dimension(N);
  return Rational(2) * (alpha + Rational(N) - Rational(2) * beta) / Rational(N - 2);
}

OpenInterval q1_range(const Envelope& env0, int N) {
  require_beta(env0.beta);
  require_dimension(N);
  OpenInterval iv;
  if (env0.alpha_any) {
    iv.lo = std::max(Rational(1), Rational(2) * env0.beta);
    iv.empty = false;
    iv.unbounded_above = true;
    return iv;
  }
  if (env0.alpha > alpha_star(env0.beta, N)) {
    iv.lo = std::max(Rational(1), Rational(2) * env0.beta);
    iv.hi = q0_star(env0.alpha, env0.beta, N);
    iv.empty = !(iv.lo < iv.hi);
  }
  return iv;
}

Rational q2_lower_bound(const Envelope& envInf, int N) {
  require_beta(envInf.beta);
  require_dimension(N);
  if (envInf.alpha_any) return std::max(Rational(1), Rational(2) * envInf.beta);
  return std::max({Rational(1), Rational(2) * envInf.beta,
                   q_inf_star(envInf.alpha, envInf.beta, N)});
}

OpenInterval q1_range(const std::vector<Envelope>& env0, int N, std::size_t* chosen) {
  if (env0.empty()) throw std::domain_error("at least one zero-end envelope is required");
  OpenInterval best = q1_range(env0.front(), N);
  std::size_t best_i = 0;
  for (std::size_t i = 1; i < env0.size(); ++i) {
    OpenInterval iv = q1_range(env0[i], N);
    if (better_interval(iv, best)) {
      best = iv;
      best_i = i;
    }
  }
  if (chosen) *chosen = best_i;
  return best;
}

Rational q2_lower_bound(const std::vector<Envelope>& envInf, int N, std::size_t* chosen) {
  if (envInf.empty()) throw std::domain_error("at least one far-end envelope is required");
  Rational best = q2_lower_bound(envInf.front(), N);
  std::size_t best_i = 0;
  for (std::size_t i = 1; i < envInf.size(); ++i) {
    Rational b = q2_lower_bound(envInf[i], N);
    if (b < best) {
      best = b;
      best_i = i;
    }
  }
  if (chosen) *chosen = best_i;
  return best;
}

Rational delta_rate_zero(const Rational& q1, const Envelope& env0, int N) {
  if (env0.alpha_any)
    throw std::domain_error("decay rate undefined for a super-polynomial envelope");
  OpenInterval iv = q1_range(env0, N);
  if (!iv.contains(q1)) throw std::domain_error("q1 outside the admissible range");
  Rational qs = q0_star(env0.alpha, env0.beta, N);
  Rational half_gap = Rational(N - 2, 2) * (qs - q1);
  if (env0.beta == Rational(0)) return half_gap;
  if (env0.beta == Rational(1)) return env0.alpha - Rational(N - 2, 2) * (q1 - Rational(1));
  return std::min(half_gap, env0.alpha + Rational(N) * (Rational(1) - env0.beta));
}

Rational delta_rate_infinity(const Rational& q2, const Envelope& envInf, int N) {
  if (envInf.alpha_any)
    throw std::domain_error("decay rate undefined for a super-polynomial envelope");
  Rational bound = q2_lower_bound(envInf, N);
  if (!(q2 > bound)) throw std::domain_error("q2 at or below the admissible lower bound");
  // every envelope regime reduces to the same rate at infinity
  return Rational(N - 2, 2) * (q_inf_star(envInf.alpha, envInf.beta, N) - q2);
}

AdmissibilityReport existence_check(const std::vector<Envelope>& env0,
                                    const std::vector<Envelope>& envInf, const Rational& q1_in,
                                    const Rational& q2_in, const Rational& theta, int N) {
  require_dimension(N);
  AdmissibilityReport rep;
  rep.N = N;
  rep.theta = theta;
  rep.swapped = q2_in < q1_in;
  rep.q1 = rep.swapped ? q2_in : q1_in;
  rep.q2 = rep.swapped ? q1_in : q2_in;
  rep.single_power = rep.q1 == rep.q2;

  std::size_t i0 = 0, iInf = 0;
  rep.q1_interval = q1_range(env0, N, &i0);
  rep.q2_lower = q2_lower_bound(envInf, N, &iInf);
  rep.env0_used = env0[i0];
  rep.envInf_used = envInf[iInf];
  rep.alpha_star_0 = alpha_star(rep.env0_used.beta, N);
  rep.q0_star_infinite = rep.env0_used.alpha_any;
  if (!rep.q0_star_infinite)
    rep.q0_star = q0_star(rep.env0_used.alpha, rep.env0_used.beta, N);
  rep.q_inf_star = rep.envInf_used.alpha_any
                       ? Rational(0)
                       : q_inf_star(rep.envInf_used.alpha, rep.envInf_used.beta, N);

  if (!rep.q1_interval.empty) {
    rep.q1_existence = rep.q1_interval;
    rep.q1_existence.lo = std::max(rep.q1_interval.lo, Rational(4));
    if (!rep.q1_existence.unbounded_above)
      rep.q1_existence.empty = !(rep.q1_existence.lo < rep.q1_existence.hi);
    rep.q_single = rep.q1_existence;
    rep.q_single.lo = std::max(rep.q1_existence.lo, rep.q2_lower);
    if (!rep.q_single.unbounded_above) rep.q_single.empty = !(rep.q_single.lo < rep.q_single.hi);
  }

  // hypothesis checks; collect every independent failure, headline first
  auto& why = rep.reasons;
  if (!(theta > Rational(2))) why.push_back("theta must exceed 2");
  if (!(rep.q1 > Rational(4))) {
    why.push_back("q1 must exceed 4");
  } else if (rep.q1 < Rational(2) * theta) {
    why.push_back("q1 must be at least 2*theta");
  }
  if (!rep.single_power) {
    if (!(rep.q2 > Rational(4))) {
      why.push_back("q2 must exceed 4");
    } else if (rep.q2 < Rational(2) * theta) {
      why.push_back("q2 must be at least 2*theta");
    }
  }
  if (rep.q1_interval.empty) {
    why.push_back("alpha_0 must exceed alpha_star(beta_0)");
  } else {
    if (!(rep.q1 > rep.q1_interval.lo))
      why.push_back("q1 must be > " + to_string(rep.q1_interval.lo) + " strictly");
    if (!rep.q1_interval.unbounded_above && !(rep.q1 < rep.q1_interval.hi))
      why.push_back("q1 must be < " + to_string(rep.q1_interval.hi) + " strictly");
  }
  if (!(rep.q2 > rep.q2_lower))
    why.push_back("q2 must be > " + to_string(rep.q2_lower) + " strictly");

  rep.existence_ok = why.empty();
  if (rep.existence_ok) {
    if (rep.single_power) {
      rep.message = rep.q_single.unbounded_above
                        ? "ok; q > " + to_string(rep.q_single.lo)
                        : "ok; q ∈ " + to_string(rep.q_single, false);
    } else {
      std::string head = rep.q1_existence.unbounded_above
                             ? "ok (q1 > " + to_string(rep.q1_existence.lo)
                             : "ok (q1 ∈ " + to_string(rep.q1_existence);
      rep.message = head + ", q2 > " + to_string(rep.q2_lower) + ")";
    }
  } else {
    rep.message = why.front();
  }

  if (!rep.env0_used.alpha_any && rep.q1_interval.contains(rep.q1))
    rep.delta_zero = delta_rate_zero(rep.q1, rep.env0_used, N);
  if (!rep.envInf_used.alpha_any && rep.q2 > rep.q2_lower)
    rep.delta_infinity = delta_rate_infinity(rep.q2, rep.envInf_used, N);

  return rep;
}

AdmissibilityReport existence_check(const Envelope& env0, const Envelope& envInf,
                                    const Rational& q1, const Rational& q2, const Rational& theta,
                                    int N) {
  return existence_check(std::vector<Envelope>{env0}, std::vector<Envelope>{envInf}, q1, q2, theta,
                         N);
}

}  // namespace qlgs
