#include <qlgs/mountain_pass.hpp>

#include <qlgs/profiles.hpp>
#include <qlgs/seeding.hpp>

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace qlgs {
namespace {

RadialFunction scaled(const RadialFunction& u, double lambda) {
  std::vector<double> v(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) v[i] = lambda * u[i];
  return RadialFunction(u.mesh_ptr(), std::move(v));
}

// Diagonal of the stiffness matrix; preconditions descent against the
// r^{N-1} volume scaling across the graded mesh.
std::vector<double> stiffness_diagonal(const RadialMesh& m) {
  std::vector<double> d(m.size(), 0.0);
  const auto& x = m.nodes();
  for (std::size_t c = 0; c < m.cells(); ++c) {
    const double h = x[c + 1] - x[c];
    const double a = m.sphere_area() * m.cell_volume(c) / (h * h);
    d[c] += a;
    d[c + 1] += a;
  }
  return d;
}

std::size_t interior_argmax(const std::vector<double>& e) {
  std::size_t best = 1;
  for (std::size_t j = 2; j + 1 < e.size(); ++j)
    if (e[j] > e[best]) best = j;
  return best;
}

// Gradient norm over the free nodes.  The far-field node is pinned by the
// domain truncation; its gradient entry is the fixed boundary residual of
// the cut tail and never shrinks, so it must not enter convergence tests.
double free_norm(const RadialFunction& g) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < g.size(); ++i) s += g[i] * g[i];
  return std::sqrt(s);
}

// Pinned tridiagonal stiffness; shares the assembly of stiffness_diagonal.
struct StiffnessOperator {
  std::vector<double> sub, diag, sup;
  explicit StiffnessOperator(const RadialMesh& m)
      : sub(m.size() - 1, 0.0), diag(m.size(), 0.0), sup(m.size() - 1, 0.0) {
    const auto& x = m.nodes();
    for (std::size_t c = 0; c < m.cells(); ++c) {
      const double h = x[c + 1] - x[c];
      const double a = m.sphere_area() * m.cell_volume(c) / (h * h);
      diag[c] += a;
      diag[c + 1] += a;
      sub[c] -= a;
      sup[c] -= a;
    }
    diag.back() = 1.0;
    sub.back() = 0.0;
    sup.back() = 0.0;
  }
  // Solves A z = g with the pinned entry zeroed.  dgtsv overwrites, so copy.
  std::vector<double> apply_inverse(const RadialFunction& g) const {
    std::vector<double> s = sub, d = diag, p = sup, rhs(g.size());
    for (std::size_t i = 0; i + 1 < g.size(); ++i) rhs[i] = g[i];
    rhs[g.size() - 1] = 0.0;
    const lapack_int info = LAPACKE_dgtsv(
        LAPACK_ROW_MAJOR, static_cast<lapack_int>(g.size()), 1, s.data(),
        d.data(), p.data(), rhs.data(), 1);
    if (info != 0)
      throw std::runtime_error("stiffness solve failed in path deformation");
    return rhs;
  }
};

// d/dt I(t*base): one gradient assembly, free-node pairing with the ray.
double ray_derivative(const Problem& prob, const RadialFunction& base,
                      double t) {
  const RadialFunction g = prob.gradient(scaled(base, t));
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < base.size(); ++i) s += g[i] * base[i];
  return s;
}

// Rescales u to the maximum of I along its own ray (the unique positive
// stationary scale for superquadratic g).  False when no bracket exists.
bool rescale_to_ray_max(const Problem& prob, RadialFunction& u) {
  double lo, hi;
  if (ray_derivative(prob, u, 1.0) > 0.0) {
    lo = 1.0;
    hi = 2.0;
    while (ray_derivative(prob, u, hi) > 0.0) {
      lo = hi;
      hi *= 2.0;
      if (hi > 1e18) return false;
    }
  } else {
    hi = 1.0;
    lo = 0.5;
    while (ray_derivative(prob, u, lo) < 0.0) {
      hi = lo;
      lo *= 0.5;
      if (lo < 1e-18) return false;
    }
  }
  for (int k = 0; k < 50; ++k) {
    const double mid = 0.5 * (lo + hi);
    (ray_derivative(prob, u, mid) > 0.0 ? lo : hi) = mid;
  }
  u = scaled(u, 0.5 * (lo + hi));
  return true;
}

void respace(PathState& s, const Problem& prob) {
  const std::size_t n_pts = s.points.size();
  std::vector<double> cum(n_pts, 0.0);
  for (std::size_t k = 0; k + 1 < n_pts; ++k) {
    std::vector<double> d(s.points[k].size());
    for (std::size_t i = 0; i < d.size(); ++i)
      d[i] = s.points[k + 1][i] - s.points[k][i];
    RadialFunction diff(s.points[k].mesh_ptr(), std::move(d));
    double len = e_norm(diff, prob.V(), prob.transform());
    cum[k + 1] = cum[k] + std::max(len, 1e-300);
  }
  const double total = cum.back();
  std::vector<RadialFunction> fresh;
  fresh.reserve(n_pts);
  fresh.push_back(s.points.front());
  std::size_t seg = 0;
  for (std::size_t j = 1; j + 1 < n_pts; ++j) {
    const double target = total * static_cast<double>(j) /
                          static_cast<double>(n_pts - 1);
    while (seg + 2 < n_pts && cum[seg + 1] < target) ++seg;
    const double t = (target - cum[seg]) / (cum[seg + 1] - cum[seg]);
    std::vector<double> v(s.points[seg].size());
    for (std::size_t i = 0; i < v.size(); ++i)
      v[i] = (1.0 - t) * s.points[seg][i] + t * s.points[seg + 1][i];
    fresh.emplace_back(s.points[seg].mesh_ptr(), std::move(v));
  }
  fresh.push_back(s.points.back());
  s.points = std::move(fresh);
  for (std::size_t j = 1; j + 1 < n_pts; ++j)
    s.energies[j] = prob.I(s.points[j]);
  s.max_index = interior_argmax(s.energies);
}

}  // namespace

Endpoint find_endpoint(const Problem& prob, const RadialFunction& u0,
                       double rho) {
  double lambda = 1.0;
  while (lambda <= std::exp2(40)) {
    RadialFunction v = scaled(u0, lambda);
    if (prob.I(v) < 0.0 && prob.J(v) > rho)
      return Endpoint{lambda, std::move(v)};
    lambda *= 2.0;
  }
  throw std::runtime_error(
      "endpoint search failed: check (g₂)/θ>2 or mesh truncation");
}

RhoCertificate rho_certificate(const Problem& prob, double rho, int samples,
                               std::uint64_t seed) {
  if (!(rho > 0.0)) throw std::invalid_argument("rho must be positive");
  RhoCertificate cert;
  cert.rho = rho;
  const auto& g = prob.nonlinearity();
  cert.bound_shape =
      g.is_zero() ? "rho"
                  : "rho - C5*rho^(" + to_string(g.q1 / 2) + ") - C6*rho^(" +
                        to_string(g.q2 / 2) + ")";

  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    std::mt19937_64 rng(sample_seed(seed, static_cast<std::uint64_t>(i)));
    const RadialFunction u = random_bump_profile(prob.mesh_ptr(), rng);

    // Bracket J(lambda u) = rho; J is nondecreasing along the ray.
    double hi = 1.0;
    bool bracketed = false;
    for (int k = 0; k < 80; ++k) {
      if (prob.J(scaled(u, hi)) >= rho) {
        bracketed = true;
        break;
      }
      hi *= 2.0;
    }
    if (!bracketed) {
      ++cert.skipped;
      continue;
    }
    double lo = 0.0;
    for (int k = 0; k < 100; ++k) {
      const double mid = 0.5 * (lo + hi);
      if (prob.J(scaled(u, mid)) < rho)
        lo = mid;
      else
        hi = mid;
      if (hi - lo <= 1e-14 * hi) break;
    }
    best = std::min(best, prob.I(scaled(u, hi)));
    ++cert.samples;
  }
  cert.alpha_hat = cert.samples > 0 ? best : 0.0;
  return cert;
}

PathState initial_path(const Problem& prob, const RadialFunction& v,
                       int points) {
  if (points < 3) throw std::invalid_argument("path needs at least 3 points");
  PathState s;
  s.points.reserve(static_cast<std::size_t>(points));
  for (int j = 0; j < points; ++j) {
    const double t = static_cast<double>(j) / (points - 1);
    s.points.push_back(scaled(v, t));
  }
  s.energies.resize(s.points.size());
  for (std::size_t j = 0; j < s.points.size(); ++j)
    s.energies[j] = prob.I(s.points[j]);
  s.max_index = interior_argmax(s.energies);
  return s;
}

// One Armijo descent step (c = 1e-4, halving from 1) on vertex `j` along the
// preconditioned negative gradient.  Returns false when no step helps.
bool descend_vertex(PathState& state, const Problem& prob,
                    const std::vector<double>& precond, std::size_t j,
                    const RadialFunction& grad) {
  const std::size_t n = prob.dof();
  RadialFunction& p = state.points[j];
  std::vector<double> d(n, 0.0);
  double slope = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    d[i] = -grad[i] / precond[i];
    slope += grad[i] * d[i];
  }
  const double e0 = state.energies[j];
  double step = 1.0;
  for (int half = 0; half < 60; ++half) {
    std::vector<double> trial(n);
    for (std::size_t i = 0; i < n; ++i) trial[i] = p[i] + step * d[i];
    RadialFunction cand(p.mesh_ptr(), std::move(trial));
    const double e = prob.I(cand);
    if (e <= e0 + 1e-4 * step * slope) {
      p = std::move(cand);
      state.energies[j] = e;
      return true;
    }
    step *= 0.5;
  }
  return false;
}

// One descent step for vertex `j` restricted to ray maxima: the direction is
// the stiffness-inverse gradient projected off the ray, and every candidate
// is re-scaled to the maximum of I along its own ray before the Armijo test,
// so the accepted merit I(candidate) decreases monotonically while the full
// free-node gradient (not just a projection) vanishes at the limit.
bool descend_vertex_on_rays(PathState& state, const Problem& prob,
                            const StiffnessOperator& stiff, std::size_t j,
                            const RadialFunction& grad) {
  const std::size_t n = prob.dof();
  RadialFunction& p = state.points[j];
  const std::vector<double> z = stiff.apply_inverse(grad);
  double ug = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) ug += p[i] * grad[i];
  const double uau = grad_seminorm_sq(p);
  if (!(uau > 0.0)) return false;
  const double beta = ug / uau;
  std::vector<double> d(n, 0.0);
  double slope = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    d[i] = -(z[i] - beta * p[i]);
    slope += grad[i] * d[i];
  }
  const double e0 = state.energies[j];
  double step = 1.0;
  for (int half = 0; half < 60; ++half) {
    std::vector<double> trial(n);
    for (std::size_t i = 0; i < n; ++i) trial[i] = p[i] + step * d[i];
    RadialFunction cand(p.mesh_ptr(), std::move(trial));
    if (!rescale_to_ray_max(prob, cand)) {
      step *= 0.5;
      continue;
    }
    const double e = prob.I(cand);
    if (e <= e0 + 1e-4 * step * slope) {
      p = std::move(cand);
      state.energies[j] = e;
      return true;
    }
    step *= 0.5;
  }
  return false;
}

// One damped Newton step with the far-field row pinned, accepted only when
// the free-node gradient norm decreases; updates p, grad and fg in place.
bool pinned_newton_step(const Problem& prob, RadialFunction& p,
                        RadialFunction& grad, double& fg) {
  const std::size_t n = prob.dof();
  std::vector<double> sub, diag, sup, rhs(n);
  prob.hessian(p, sub, diag, sup);
  diag[n - 1] = 1.0;
  sub[n - 2] = 0.0;
  sup[n - 2] = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) rhs[i] = -grad[i];
  rhs[n - 1] = 0.0;
  if (LAPACKE_dgtsv(LAPACK_ROW_MAJOR, static_cast<lapack_int>(n), 1,
                    sub.data(), diag.data(), sup.data(), rhs.data(), 1) != 0)
    return false;
  double step = 1.0;
  for (int half = 0; half < 40; ++half) {
    std::vector<double> trial(n);
    for (std::size_t i = 0; i < n; ++i) trial[i] = p[i] + step * rhs[i];
    RadialFunction cand(p.mesh_ptr(), std::move(trial));
    RadialFunction cg = prob.gradient(cand);
    const double cn = free_norm(cg);
    if (cn < fg) {
      p = std::move(cand);
      grad = std::move(cg);
      fg = cn;
      return true;
    }
    step *= 0.5;
  }
  return false;
}

bool newton_vertex(PathState& state, const Problem& prob, std::size_t j,
                   RadialFunction& grad, double& fg) {
  if (!pinned_newton_step(prob, state.points[j], grad, fg)) return false;
  state.energies[j] = prob.I(state.points[j]);
  return true;
}

PathState deform_path(PathState state, const Problem& prob, double tol,
                      int max_iter) {
  const std::vector<double> precond = stiffness_diagonal(prob.mesh());
  const StiffnessOperator stiff(prob.mesh());

  // kGlobal: descent at the max vertex with periodic re-spacing, until the
  // re-space cycle stops lowering the max.  kRay/kNewton: polish the vertex
  // the cycle left hanging near the pass level.  kCleanup: push any stale
  // vertex still above the polished one back down.
  enum class Phase { kGlobal, kRay, kNewton, kCleanup };
  Phase phase = Phase::kGlobal;
  std::size_t work = 0;
  bool on_ray = false;
  int accepted_since_respace = 0;
  int slow_cleanup = 0;
  std::vector<double> respace_levels;

  for (int iter = 0; iter < max_iter; ++iter) {
    state.max_index = interior_argmax(state.energies);
    const std::size_t am = state.max_index;
    RadialFunction grad = prob.gradient(state.points[am]);
    double fg = free_norm(grad);
    state.history.push_back(
        IterRecord{state.iterations, state.energies[am], fg, false, false});
    if (fg <= tol) {
      state.converged = true;
      return state;
    }
    ++state.iterations;

    if (phase == Phase::kGlobal) {
      if (!descend_vertex(state, prob, precond, am, grad)) {
        phase = Phase::kRay;  // descent exhausted; polish this vertex
        work = am;
        continue;
      }
      if (++accepted_since_respace == 10) {
        respace(state, prob);
        accepted_since_respace = 0;
        state.history.push_back(
            IterRecord{state.iterations, state.energies[state.max_index],
                       free_norm(prob.gradient(state.points[state.max_index])),
                       true, false});
        respace_levels.push_back(state.energies[state.max_index]);
        const std::size_t m = respace_levels.size();
        // Re-spacing re-samples chords across the energy ridge, so once the
        // max stops dropping between re-spacings the cycle has equilibrated.
        if (m >= 4 && respace_levels[m - 4] - respace_levels[m - 1] <
                          1e-3 * (1.0 + std::abs(respace_levels[m - 1]))) {
          phase = Phase::kRay;
          work = interior_argmax(state.energies);
        }
      }
      continue;
    }

    if (am != work) {
      grad = prob.gradient(state.points[work]);
      fg = free_norm(grad);
    }
    if (phase == Phase::kRay) {
      if (!on_ray) {
        if (rescale_to_ray_max(prob, state.points[work])) {
          state.energies[work] = prob.I(state.points[work]);
          on_ray = true;
          state.history.push_back(IterRecord{
              state.iterations, state.energies[work],
              free_norm(prob.gradient(state.points[work])), false, true});
        } else {
          phase = Phase::kNewton;  // no ray maximum; try Newton directly
        }
        continue;
      }
      if (fg <= 1e-4 ||
          !descend_vertex_on_rays(state, prob, stiff, work, grad)) {
        phase = Phase::kNewton;  // close enough (or stalled): switch metric
      }
      continue;
    }

    if (phase == Phase::kNewton) {
      if (fg <= tol || !newton_vertex(state, prob, work, grad, fg)) {
        if (fg > tol) break;     // cannot polish further; report honestly
        phase = Phase::kCleanup;
      }
      continue;
    }

    // kCleanup: the polished vertex converged but a stale vertex sits above
    // it; plain descent tips such chord relics off the ridge.  A relic that
    // creeps instead of dropping sits near the ridge itself, so it is handed
    // back to the ray polish rather than crept at or abandoned.
    if (am == work) break;
    const double before = state.energies[am];
    const bool stepped = descend_vertex(state, prob, precond, am, grad);
    if (stepped &&
        before - state.energies[am] > 1e-6 * (1.0 + std::abs(before))) {
      slow_cleanup = 0;
      continue;
    }
    if (stepped && ++slow_cleanup < 3) continue;
    phase = Phase::kRay;
    work = am;
    on_ray = false;
    slow_cleanup = 0;
  }

  state.max_index = interior_argmax(state.energies);
  state.converged =
      free_norm(prob.gradient(state.points[state.max_index])) <= tol;
  return state;
}

RefineResult refine(const RadialFunction& u, const Problem& prob, double tol) {
  RefineResult res{u, 0, 0.0, false, {}};
  RadialFunction grad = prob.gradient(res.u);
  double gnorm = free_norm(grad);
  if (gnorm > 1e-3) {
    std::ostringstream msg;
    msg << "refine needs gradient norm <= 1e-3, got " << gnorm;
    throw std::invalid_argument(msg.str());
  }
  res.grad_history.push_back(gnorm);

  const std::size_t n = prob.dof();
  std::vector<double> sub, diag, sup, rhs(n);
  double prev_energy = prob.I(res.u);
  int energy_up_streak = 0;
  for (int iter = 0; iter < 200 && gnorm > tol; ++iter) {
    prob.hessian(res.u, sub, diag, sup);
    // Pin the Dirichlet end: unit row, zero coupling.
    diag[n - 1] = 1.0;
    sub[n - 2] = 0.0;
    sup[n - 2] = 0.0;
    for (std::size_t i = 0; i < n; ++i) rhs[i] = -grad[i];
    rhs[n - 1] = 0.0;
    const lapack_int info = LAPACKE_dgtsv(
        LAPACK_ROW_MAJOR, static_cast<lapack_int>(n), 1, sub.data(),
        diag.data(), sup.data(), rhs.data(), 1);
    if (info != 0)
      throw std::runtime_error("refine: singular tridiagonal Newton system");

    double step = 1.0;
    bool ok = false;
    for (int half = 0; half < 40; ++half) {
      std::vector<double> trial(n);
      for (std::size_t i = 0; i < n; ++i) trial[i] = res.u[i] + step * rhs[i];
      RadialFunction cand(res.u.mesh_ptr(), std::move(trial));
      RadialFunction cg = prob.gradient(cand);
      const double cn = free_norm(cg);
      if (cn < gnorm) {
        res.u = std::move(cand);
        grad = std::move(cg);
        gnorm = cn;
        ok = true;
        break;
      }
      step *= 0.5;
    }
    ++res.iterations;
    if (!ok) break;  // no damped step reduces the gradient further
    res.grad_history.push_back(gnorm);

    const double energy = prob.I(res.u);
    energy_up_streak = energy > prev_energy ? energy_up_streak + 1 : 0;
    prev_energy = energy;
    if (energy_up_streak >= 10)
      throw SolverDivergence(
          "refine diverged: energy increased 10 consecutive steps", res.u);
  }
  res.grad_norm = gnorm;

  for (std::size_t i = 0; i < n; ++i) {
    if (res.u[i] < 0.0) {
      if (res.u[i] >= -1e-12)
        res.u[i] = 0.0;
      else
        res.negative_flagged = true;
    }
  }
  return res;
}

RefineResult refine_on_mesh(const RadialFunction& u, const Problem& fine,
                            double tol) {
  const MeshPtr mesh = fine.mesh_ptr();
  std::vector<double> v(mesh->size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = u.eval(mesh->node(i));
  v.back() = 0.0;
  RadialFunction cur(mesh, std::move(v));

  // The interpolant's piecewise-linear kinks leave a sizable nodal gradient
  // that one or two full Newton steps absorb; contract below the gated
  // polish's entry threshold first.
  RadialFunction grad = fine.gradient(cur);
  double fg = free_norm(grad);
  for (int it = 0; fg > 1e-3; ++it) {
    if (it >= 50 || !pinned_newton_step(fine, cur, grad, fg))
      throw SolverDivergence("mesh transfer stalled: gradient not contracting",
                             cur);
  }
  return refine(cur, fine, tol);
}

SolveReport solve(const Problem& prob, const SolveOptions& opt) {
  const RadialFunction u0 = tent_profile(prob.mesh_ptr(), opt.u0_inner,
                                         opt.u0_outer, opt.u0_height);
  Endpoint ep = find_endpoint(prob, u0, std::max(opt.rho, 0.0));
  const double rho = opt.rho > 0.0 ? opt.rho : 1e-3 * prob.J(ep.v) / 2.0;

  RhoCertificate cert =
      rho_certificate(prob, rho, opt.rho_samples, opt.seed);
  if (!(cert.alpha_hat > 0.0)) {
    std::ostringstream msg;
    msg << "mountain-pass certificate failed: alpha_hat = " << cert.alpha_hat
        << " at rho = " << rho;
    throw std::runtime_error(msg.str());
  }

  PathState path = initial_path(prob, ep.v, opt.path_points + 1);
  const double initial_max =
      *std::max_element(path.energies.begin(), path.energies.end());
  path = deform_path(std::move(path), prob, opt.deform_tol,
                     opt.max_deform_iter);

  SolveReport rep(prob.mesh_ptr());
  rep.u = path.points[path.max_index];
  rep.lambda = ep.lambda;
  rep.certificate = cert;
  rep.initial_path_max_energy = initial_max;
  rep.deform_iterations = path.iterations;
  rep.history = path.history;
  if (path.converged) {
    RefineResult fine = refine(path.points[path.max_index], prob,
                               opt.refine_tol);
    rep.u = fine.u;
    rep.refine_iterations = fine.iterations;
    rep.negative_flagged = fine.negative_flagged;
    rep.converged = fine.grad_norm <= opt.refine_tol;
  }
  rep.I = prob.I(rep.u);
  rep.J = prob.J(rep.u);
  rep.grad_norm = free_norm(prob.gradient(rep.u));
  std::vector<double> w(rep.u.size());
  for (std::size_t i = 0; i < w.size(); ++i)
    w[i] = prob.transform().f(rep.u[i]);
  rep.w = RadialFunction(prob.mesh_ptr(), std::move(w));
  rep.min_nodal = *std::min_element(rep.u.values().begin(),
                                    rep.u.values().end());
  return rep;
}

}  // namespace qlgs
