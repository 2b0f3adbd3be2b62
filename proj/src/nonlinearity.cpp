#include <qlgs/nonlinearity.hpp>

#include <qlgs/dual_transform.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace qlgs {
namespace {

double rpow(double t, const Rational& e) { return std::pow(t, to_double(e)); }

// g on t >= 0 for each kind; truncation and odd extension live in g_eval.
double g_positive(const NonlinearitySpec& s, double t) {
  switch (s.kind) {
    case NonlinearitySpec::Kind::min_power:
      return t <= 1.0 ? rpow(t, s.q2 - 1) : rpow(t, s.q1 - 1);
    case NonlinearitySpec::Kind::single_power:
      return rpow(t, s.q1 - 1);
    case NonlinearitySpec::Kind::ratio_power: {
      const Rational d = s.q2 - s.q1;
      // Divide through by t^d above 1 so neither factor overflows first.
      if (t <= 1.0) return rpow(t, s.q2 - 1) / (1.0 + rpow(t, d));
      return rpow(t, s.q1 - 1) / (1.0 + rpow(t, -d));
    }
    case NonlinearitySpec::Kind::zero:
      return 0.0;
  }
  return 0.0;
}

double g_prime_positive(const NonlinearitySpec& s, double t) {
  switch (s.kind) {
    case NonlinearitySpec::Kind::min_power:
      // Kink at t=1: report the slope of the outer (t >= 1) branch there.
      return t < 1.0 ? to_double(s.q2 - 1) * rpow(t, s.q2 - 2)
                     : to_double(s.q1 - 1) * rpow(t, s.q1 - 2);
    case NonlinearitySpec::Kind::single_power:
      return to_double(s.q1 - 1) * rpow(t, s.q1 - 2);
    case NonlinearitySpec::Kind::ratio_power: {
      const Rational d = s.q2 - s.q1;
      const double a = to_double(s.q1 - 1);
      const double b = to_double(s.q2 - 1);
      if (t <= 1.0) {
        const double td = rpow(t, d);
        const double den = 1.0 + td;
        return rpow(t, s.q2 - 2) * (b + a * td) / (den * den);
      }
      const double tmd = rpow(t, -d);
      const double den = 1.0 + tmd;
      return (a * rpow(t, s.q1 - 2) + b * rpow(t, s.q1 - 2 - d)) / (den * den);
    }
    case NonlinearitySpec::Kind::zero:
      return 0.0;
  }
  return 0.0;
}

double adaptive_simpson(const NonlinearitySpec& s, double a, double fa,
                        double b, double fb, double whole, double tol,
                        int depth) {
  const double m = 0.5 * (a + b);
  const double fm = g_positive(s, m);
  const double h = b - a;
  const double left = h / 12.0 * (fa + 4.0 * g_positive(s, 0.5 * (a + m)) + fm);
  const double right =
      h / 12.0 * (fm + 4.0 * g_positive(s, 0.5 * (m + b)) + fb);
  const double split = left + right;
  if (depth <= 0 || std::abs(split - whole) <= 15.0 * tol) {
    return split + (split - whole) / 15.0;
  }
  return adaptive_simpson(s, a, fa, m, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(s, m, fm, b, fb, right, 0.5 * tol, depth - 1);
}

double integrate_g(const NonlinearitySpec& s, double a, double b,
                   double rel_tol) {
  if (a == b) return 0.0;
  const double fa = g_positive(s, a);
  const double fb = g_positive(s, b);
  const double whole =
      (b - a) / 6.0 * (fa + 4.0 * g_positive(s, 0.5 * (a + b)) + fb);
  // Tolerance scales with the segment itself so tiny segments near zero
  // still integrate to relative accuracy.
  const double eff = rel_tol * std::abs(whole) + 1e-300;
  return adaptive_simpson(s, a, fa, b, fb, whole, eff, 48);
}

// G anchors for ratio_power at half-octave points, shared per (q1, q2).
struct AnchorTable {
  std::vector<double> t;
  std::vector<double> G;
};

std::shared_ptr<const AnchorTable> ratio_anchors(const NonlinearitySpec& s) {
  using Key = std::tuple<long long, long long, long long, long long>;
  static std::mutex mu;
  static std::map<Key, std::shared_ptr<const AnchorTable>> cache;
  const Key key{s.q1.numerator(), s.q1.denominator(), s.q2.numerator(),
                s.q2.denominator()};
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  auto table = std::make_shared<AnchorTable>();
  table->t.push_back(0.0);
  table->G.push_back(0.0);
  for (int k = -80; k <= 60; ++k) {
    const double t = std::exp2(0.5 * k);
    const double prev_t = table->t.back();
    const double prev_G = table->G.back();
    table->t.push_back(t);
    table->G.push_back(prev_G + integrate_g(s, prev_t, t, 1e-13));
  }
  cache.emplace(key, table);
  return table;
}

double G_positive(const NonlinearitySpec& s, double t) {
  switch (s.kind) {
    case NonlinearitySpec::Kind::min_power:
      if (t <= 1.0) return rpow(t, s.q2) / to_double(s.q2);
      return 1.0 / to_double(s.q2) +
             (rpow(t, s.q1) - 1.0) / to_double(s.q1);
    case NonlinearitySpec::Kind::single_power:
      return rpow(t, s.q1) / to_double(s.q1);
    case NonlinearitySpec::Kind::ratio_power: {
      const auto table = ratio_anchors(s);
      auto it = std::upper_bound(table->t.begin(), table->t.end(), t);
      const std::size_t j = static_cast<std::size_t>(it - table->t.begin()) - 1;
      const double base = table->G[j];
      return base + integrate_g(s, table->t[j], t, 1e-13);
    }
    case NonlinearitySpec::Kind::zero:
      return 0.0;
  }
  return 0.0;
}

}  // namespace

NonlinearitySpec NonlinearitySpec::min_power(Rational q1, Rational q2) {
  NonlinearitySpec s;
  s.kind = Kind::min_power;
  s.q1 = q1;
  s.q2 = q2;
  s.theta = std::min(q1, q2) / 2;
  s.validate();
  return s;
}

NonlinearitySpec NonlinearitySpec::ratio_power(Rational q1, Rational q2) {
  NonlinearitySpec s = min_power(q1, q2);
  s.kind = Kind::ratio_power;
  return s;
}

NonlinearitySpec NonlinearitySpec::single_power(Rational q) {
  NonlinearitySpec s = min_power(q, q);
  s.kind = Kind::single_power;
  return s;
}

NonlinearitySpec NonlinearitySpec::zero() { return NonlinearitySpec{}; }

NonlinearitySpec NonlinearitySpec::with_theta(Rational th) const {
  NonlinearitySpec s = *this;
  s.theta = th;
  s.validate();
  return s;
}

NonlinearitySpec NonlinearitySpec::untruncated() const {
  NonlinearitySpec s = *this;
  s.truncated_negative = false;
  return s;
}

void NonlinearitySpec::validate() const {
  if (kind == Kind::zero) return;
  if (q1 > q2) throw std::invalid_argument("nonlinearity needs q1 <= q2");
  if (theta <= 2) throw std::invalid_argument("nonlinearity needs theta > 2");
  if (2 * theta > q1)
    throw std::invalid_argument("nonlinearity needs 2*theta <= q1");
}

std::string NonlinearitySpec::describe() const {
  switch (kind) {
    case Kind::min_power:
      return "min_power(q1=" + to_string(q1) + ", q2=" + to_string(q2) +
             ", theta=" + to_string(theta) + ")";
    case Kind::ratio_power:
      return "ratio_power(q1=" + to_string(q1) + ", q2=" + to_string(q2) +
             ", theta=" + to_string(theta) + ")";
    case Kind::single_power:
      return "single_power(q=" + to_string(q1) +
             ", theta=" + to_string(theta) + ")";
    case Kind::zero:
      return "zero";
  }
  return "zero";
}

double g_eval(const NonlinearitySpec& spec, double t) {
  if (t >= 0.0) return g_positive(spec, t);
  if (spec.truncated_negative) return 0.0;
  // Odd extension; keeps |g| inside the double-power envelope.
  return -g_positive(spec, -t);
}

double g_prime(const NonlinearitySpec& spec, double t) {
  if (t >= 0.0) return g_prime_positive(spec, t);
  if (spec.truncated_negative) return 0.0;
  return g_prime_positive(spec, -t);
}

double G_eval(const NonlinearitySpec& spec, double t) {
  if (t >= 0.0) return G_positive(spec, t);
  if (spec.truncated_negative) return 0.0;
  return G_positive(spec, -t);
}

double empirical_envelope_constant(const NonlinearitySpec& spec) {
  double sup = 0.0;
  for (double t : DualTransform::standard_sweep()) {
    const double a = std::abs(t);
    if (a == 0.0) continue;
    const double envelope =
        std::min(rpow(a, spec.q1 - 1), rpow(a, spec.q2 - 1));
    if (envelope == 0.0 || !std::isfinite(envelope)) continue;
    sup = std::max(sup, std::abs(g_eval(spec, t)) / envelope);
  }
  return sup;
}

}  // namespace qlgs
