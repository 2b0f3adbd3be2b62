#pragma once

#include <qlgs/energy.hpp>
#include <qlgs/exponents.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace qlgs {

// Post-hoc checks for a computed critical point: pointwise finite-difference
// residuals of both ODE forms, the back-transform identity, weak-form defects
// against a battery of smooth test bumps, an empirical decay constant, and
// embedding-decay rate fits.  The solver never sees these quantities; they
// are recomputed from the profile alone so they can catch assembly bugs.

// max pointwise residual over the trimmed interior, raw and relative to the
// local sum of term magnitudes
struct ResidualScan {
  double max_rel = 0.0;
  double max_raw = 0.0;
};

struct RateFit {
  double delta_hat = 0.0;       // least-squares slope of log S vs log R
  Rational delta_predicted{0};  // exact rate from the exponent formulas
  std::vector<double> radii;
  std::vector<double> s_estimate;
};

struct ResidualReport {
  ResidualScan dual_ode;
  ResidualScan original;
  double identity_max_rel = 0.0;
  double weak_form_max_defect = 0.0;
  double decay_ratio = 0.0;        // sup |u| r^{(N-2)/2} over the seminorm
  double decay_library_max = 0.0;  // same ratio maximized over a profile bank
  std::optional<RateFit> rate_zero;
  std::optional<RateFit> rate_infinity;
};

// Residual of u'' + (N-1)/r u' - V f(u) f'(u) + K g(f(u)) f'(u) = source
// by second-order nonuniform stencils, dropping 5 nodes at each end; the
// source hook exists for manufactured-solution checks and defaults to zero.
ResidualScan dual_ode_scan(const RadialFunction& u, const Problem& prob,
                           const std::function<double(double)>& source = {});
double dual_ode_residual(const RadialFunction& u, const Problem& prob);

// Residual of -(1+2w^2)(w'' + (N-1)/r w') - 2w(w')^2 + V w - K g(w) = source
// on the trimmed interior; expects w = f(u) nodewise.
ResidualScan original_equation_scan(const RadialFunction& w, const Problem& prob,
                                    const std::function<double(double)>& source = {});
double original_equation_residual(const RadialFunction& w, const Problem& prob);

// Nodewise agreement of the chain-rule identity
//   lap w + w lap(w^2) = lap u / f'(u)
// linking the two equation forms; max relative mismatch over the interior.
double back_transform_identity_residual(const RadialFunction& w,
                                        const RadialFunction& u,
                                        const DualTransform& ft);

// Smooth compactly supported radial test function for the weak form.
struct TestBump {
  double center = 1.0;
  double width = 1.0;  // support is center * e^{+-width}
};
std::vector<TestBump> default_test_battery();

// Max defect of int (1+2w^2) grad w . grad h + int 2w|grad w|^2 h
// + int V w h - int K g(w) h over the battery, each defect normalized by
// the sum of its term magnitudes.  Bumps whose support leaves the mesh
// interval are skipped: the identity assumes h vanishes at both ends.
double weak_form_defect(const RadialFunction& w, const Problem& prob,
                        const std::vector<TestBump>& battery = default_test_battery());

// Largest empirical decay ratio sup |u| r^{(N-2)/2} / ||grad u||_2 over a
// deterministic bank of profiles; the computed solution's own ratio must
// not beat this bank by more than a few percent.
double decay_library_constant(const MeshPtr& mesh);

enum class RateSide { zero, infinity };

// Empirical decay rate of the restricted embedding constant: maximizes
// int_{B_R} K |u|^q (side zero; complement for side infinity) over random
// normalized profiles plus a capped power-decay profile, on a ladder of 8
// dyadic radii, and fits log S against log R.  Throws std::domain_error
// via the exact rate formulas when q is outside the admissible range.
RateFit embedding_rate_fit(const Rational& q, const Envelope& env, RateSide side,
                           MeshPtr mesh, const Potential& V, const Potential& K,
                           const DualTransform& ft, int samples,
                           std::uint64_t seed = 1);

// Full suite for a computed pair (u, w = f(u)); rate fits are attached by
// the caller when envelope data is available.
ResidualReport verify_solution(const RadialFunction& u, const RadialFunction& w,
                               const Problem& prob);

}  // namespace qlgs
