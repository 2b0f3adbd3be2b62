#pragma once

#include <qlgs/dual_transform.hpp>
#include <qlgs/nonlinearity.hpp>
#include <qlgs/potentials.hpp>
#include <qlgs/radial_mesh.hpp>

#include <vector>

namespace qlgs {

// Discrete dual energy on the radial mesh,
//   I(u) = 1/2 int |grad u|^2 + 1/2 int V f(u)^2 - int K G(f(u)),
// with u piecewise linear and every integral taken by the mesh's per-cell
// Gauss rule.  gradient() and hessian() differentiate that quadrature form
// exactly, so finite differences of I close on them to roundoff.
class Problem {
 public:
  Problem(MeshPtr mesh, Potential V, Potential K, NonlinearitySpec g,
          DualTransform ft = DualTransform());

  const RadialMesh& mesh() const { return *mesh_; }
  MeshPtr mesh_ptr() const { return mesh_; }
  const Potential& V() const { return V_; }
  const Potential& K() const { return K_; }
  const NonlinearitySpec& nonlinearity() const { return g_; }
  const DualTransform& transform() const { return ft_; }
  std::size_t dof() const { return mesh_->size(); }

  double I(const RadialFunction& u) const;
  // Quadratic part 1/2 int |grad u|^2 + 1/2 int V f(u)^2; equals I when
  // the nonlinearity is zero.
  double J(const RadialFunction& u) const;
  RadialFunction gradient(const RadialFunction& u) const;

  // Tridiagonal second derivative in LAPACK dgtsv band layout:
  // sub/sup hold n-1 off-diagonal entries, diag holds n.
  void hessian(const RadialFunction& u, std::vector<double>& sub,
               std::vector<double>& diag, std::vector<double>& sup) const;

 private:
  double potential_term(const RadialFunction& u) const;
  double nonlinear_term(const RadialFunction& u) const;

  MeshPtr mesh_;
  Potential V_;
  Potential K_;
  NonlinearitySpec g_;
  DualTransform ft_;
  std::vector<double> Vq_, Kq_;  // potentials at quadrature points
};

// Operation-catalog forms; each builds a transient Problem.
double I_eval(const RadialFunction& u, const Potential& V, const Potential& K,
              const NonlinearitySpec& g, const DualTransform& ft);
RadialFunction I_gradient(const RadialFunction& u, const Potential& V,
                          const Potential& K, const NonlinearitySpec& g,
                          const DualTransform& ft);
double J_eval(const RadialFunction& u, const Potential& V,
              const DualTransform& ft);

// Plain l2 norm of a nodal co-vector; the solver's convergence measure.
double nodal_norm(const RadialFunction& grad);

}  // namespace qlgs
