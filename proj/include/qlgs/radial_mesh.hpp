#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <vector>

#include "qlgs/dual_transform.hpp"
#include "qlgs/potentials.hpp"

namespace qlgs {

// Geometric mesh on [r_min, r_max] carrying per-cell 3-point Gauss-Legendre
// quadrature against the measure r^{N-1} dr.  Immutable after construction.
class RadialMesh {
 public:
  static constexpr std::size_t kDefaultNodes = 2000;

  RadialMesh(int N, double r_min, double r_max, std::size_t num_nodes = kDefaultNodes);

  int dimension() const { return N_; }
  double sphere_area() const { return sphere_area_; }  // area of S^{N-1}
  double r_min() const { return nodes_.front(); }
  double r_max() const { return nodes_.back(); }
  double ratio() const { return ratio_; }
  std::size_t size() const { return nodes_.size(); }
  std::size_t cells() const { return nodes_.size() - 1; }
  const std::vector<double>& nodes() const { return nodes_; }
  double node(std::size_t i) const { return nodes_[i]; }

  // exact integral of r^{N-1} over cell i (no sphere factor)
  double cell_volume(std::size_t i) const { return cell_volume_[i]; }
  double total_volume() const;

  // flattened quadrature data, 3 points per cell; weights carry r^{N-1}
  const std::vector<double>& quad_r() const { return quad_r_; }
  const std::vector<double>& quad_w() const { return quad_w_; }

  bool same_as(const RadialMesh& other) const;

 private:
  int N_;
  double ratio_;
  double sphere_area_;
  std::vector<double> nodes_;
  std::vector<double> cell_volume_;
  std::vector<double> quad_r_;
  std::vector<double> quad_w_;
};

using MeshPtr = std::shared_ptr<const RadialMesh>;

// Nodal values with piecewise-linear interpolation; the solver pins the last
// node to 0 (truncated Dirichlet end) but stored values are not forced.
class RadialFunction {
 public:
  explicit RadialFunction(MeshPtr mesh);
  RadialFunction(MeshPtr mesh, std::vector<double> values);

  const RadialMesh& mesh() const { return *mesh_; }
  const MeshPtr& mesh_ptr() const { return mesh_; }
  std::size_t size() const { return values_.size(); }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  // interpolated value: constant below r_min, 0 beyond r_max
  double eval(double r) const;

 private:
  MeshPtr mesh_;
  std::vector<double> values_;
};

double grad_seminorm_sq(const RadialFunction& u);

// integral of weight(r) * u(r)^2 (or f(u)^2 with a transform) over R^N;
// throws on weight overflow at a cell that actually contributes
double weighted_l2(const RadialFunction& u, const Potential& weight,
                   const DualTransform* transform = nullptr);

// Luxemburg-style norm inf_k (1 + integral V f(ku)^2 dx) / k
double orlicz_norm(const RadialFunction& u, const Potential& V, const DualTransform& ft);

double e_norm(const RadialFunction& u, const Potential& V, const DualTransform& ft);

// empirical decay constant: max over nodes of |u| r^{(N-2)/2} / ||u||_{1,2}
double sup_decay_check(const RadialFunction& u);

struct CsvError : std::runtime_error {
  CsvError(const std::string& what, std::size_t row) : std::runtime_error(what), row(row) {}
  std::size_t row;  // 1-based row number including the header
};

void write_csv(const RadialFunction& u, std::ostream& out);
// returns (r, value) columns; throws CsvError naming the bad row
std::pair<std::vector<double>, std::vector<double>> read_csv(std::istream& in);

}  // namespace qlgs
