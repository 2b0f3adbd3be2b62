#pragma once

#include <qlgs/energy.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace qlgs {

// Ray endpoint with negative energy: v = lambda * u0, found by doubling.
struct Endpoint {
  double lambda = 1.0;
  RadialFunction v;
};
// Doubles lambda from 1 until I(lambda*u0) < 0 and J(lambda*u0) > rho.
// Throws when lambda exceeds 2^40 without success.
Endpoint find_endpoint(const Problem& prob, const RadialFunction& u0,
                       double rho = 0.0);

// Empirical barrier certificate: the minimum of I over random profiles
// rescaled onto the sphere {J = rho}.  Sampled, not proven.
struct RhoCertificate {
  double rho = 0.0;
  double alpha_hat = 0.0;
  int samples = 0;
  int skipped = 0;          // profiles whose ray never reached J = rho
  bool empirical = true;
  std::string bound_shape;  // the proof-side lower-bound shape in rho
};
RhoCertificate rho_certificate(const Problem& prob, double rho, int samples,
                               std::uint64_t seed);

// One deformation step.  grad_norm is measured over the free nodes only: the
// far-field node is pinned by the domain truncation, so its gradient entry is
// a fixed boundary residual, not a solver unknown.
struct IterRecord {
  int iter = 0;
  double max_energy = 0.0;
  double grad_norm = 0.0;
  bool respaced = false;   // path re-parametrization, not a descent step
  bool rescaled = false;   // ray re-positioning, not a descent step
};

// Discrete path from 0 to the endpoint; points share one mesh.
struct PathState {
  std::vector<RadialFunction> points;
  std::vector<double> energies;
  std::size_t max_index = 0;
  int iterations = 0;
  bool converged = false;
  std::vector<IterRecord> history;
};
// Straight-line path with `points` samples of [0, v], energies filled in.
PathState initial_path(const Problem& prob, const RadialFunction& v,
                       int points);
// Deforms the path until the free-node gradient norm at the maximal-energy
// point drops to tol.  Starts with damped descent at the max point (Armijo
// backtracking, stiffness-diagonal preconditioner) re-spacing the path in the
// E-norm every 10 accepted steps; that alone limit-cycles near the pass level
// (re-spacing samples chords that re-cross the energy ridge), so once the
// re-space cycle stagnates the max vertex is polished in place: descent
// restricted to ray maxima (each step re-scales the vertex to the maximum of
// I along its own ray, keeping the merit monotone), then a damped Newton
// finish, then cleanup descent on any stale vertex left above the polished
// one.  Ray re-positioning and re-spacing may raise the recorded max; those
// records carry the respaced/rescaled flags, every other step is monotone.
PathState deform_path(PathState state, const Problem& prob, double tol,
                      int max_iter);

// Divergence carries the last iterate so callers can dump it.
struct SolverDivergence : std::runtime_error {
  SolverDivergence(const std::string& msg, RadialFunction last)
      : std::runtime_error(msg), iterate(std::move(last)) {}
  RadialFunction iterate;
};

struct RefineResult {
  RadialFunction u;
  int iterations = 0;
  double grad_norm = 0.0;
  bool negative_flagged = false;  // nodal value below -1e-12 survived
  std::vector<double> grad_history;
};
// Damped tridiagonal Newton polish toward free-node gradient norm <= tol;
// expects the input already near-critical (free-node gradient norm <= 1e-3).
RefineResult refine(const RadialFunction& u, const Problem& prob,
                    double tol = 1e-10);

// Transfers a converged critical point to another discretization of the
// same problem: interpolates onto the target mesh, contracts the transfer
// gradient with damped Newton, then runs the gated polish.  Used for
// mesh-refinement studies of residual order and weak-form defect.
RefineResult refine_on_mesh(const RadialFunction& u, const Problem& fine,
                            double tol = 1e-10);

struct SolveOptions {
  double rho = 0.0;       // <= 0 selects 1e-3 * J(endpoint) / 2
  int path_points = 21;   // P; the path stores P+1 points
  int rho_samples = 64;
  double deform_tol = 1e-3;
  int max_deform_iter = 20000;
  double refine_tol = 1e-10;
  std::uint64_t seed = 1;
  double u0_inner = 1.0;
  double u0_outer = 2.0;
  double u0_height = 3.0;
};

struct SolveReport {
  explicit SolveReport(MeshPtr mesh) : u(mesh), w(std::move(mesh)) {}
  RadialFunction u;  // critical point of I
  RadialFunction w;  // f(u), nodewise
  double I = 0.0;
  double J = 0.0;
  double grad_norm = 0.0;  // over free nodes; the truncation node is pinned
  double lambda = 0.0;
  RhoCertificate certificate;
  double initial_path_max_energy = 0.0;
  double min_nodal = 0.0;
  int deform_iterations = 0;
  int refine_iterations = 0;
  bool converged = false;
  bool negative_flagged = false;
  bool outside_hypotheses = false;  // set by the front end under --force
  std::vector<IterRecord> history;
  std::string residual_summary;  // filled by the verification stage
};
SolveReport solve(const Problem& prob, const SolveOptions& opt = {});

}  // namespace qlgs
