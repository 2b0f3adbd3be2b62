#include "qlgs/radial_mesh.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

namespace qlgs {

namespace {

// 3-point Gauss-Legendre on [-1, 1]
const double kGx[3] = {-std::sqrt(3.0 / 5.0), 0.0, std::sqrt(3.0 / 5.0)};
const double kGw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

double sphere_area_for(int N) {
  // 2 pi^{N/2} / Gamma(N/2)
  return 2.0 * std::pow(M_PI, 0.5 * N) / std::tgamma(0.5 * N);
}

}  // namespace

RadialMesh::RadialMesh(int N, double r_min, double r_max, std::size_t num_nodes) : N_(N) {
  if (N < 3) throw std::domain_error("dimension must be at least 3");
  if (!(r_min > 0.0) || !(r_max > r_min)) throw std::domain_error("need 0 < r_min < r_max");
  if (num_nodes < 8) throw std::domain_error("mesh needs at least 8 nodes");
  sphere_area_ = sphere_area_for(N);
  ratio_ = std::pow(r_max / r_min, 1.0 / static_cast<double>(num_nodes - 1));
  nodes_.resize(num_nodes);
  double log_min = std::log(r_min), log_max = std::log(r_max);
  for (std::size_t i = 0; i < num_nodes; ++i) {
    double s = static_cast<double>(i) / static_cast<double>(num_nodes - 1);
    nodes_[i] = std::exp(log_min + s * (log_max - log_min));
  }
  nodes_.front() = r_min;
  nodes_.back() = r_max;

  cell_volume_.resize(cells());
  quad_r_.resize(3 * cells());
  quad_w_.resize(3 * cells());
  for (std::size_t c = 0; c < cells(); ++c) {
    double a = nodes_[c], b = nodes_[c + 1];
    cell_volume_[c] = (std::pow(b, N) - std::pow(a, N)) / N;
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int g = 0; g < 3; ++g) {
      double r = mid + half * kGx[g];
      quad_r_[3 * c + g] = r;
      quad_w_[3 * c + g] = half * kGw[g] * std::pow(r, N - 1);
    }
  }
}

double RadialMesh::total_volume() const {
  double s = 0.0;
  for (double v : cell_volume_) s += v;
  return s;
}

bool RadialMesh::same_as(const RadialMesh& other) const {
  return N_ == other.N_ && nodes_.size() == other.nodes_.size() &&
         nodes_.front() == other.nodes_.front() && nodes_.back() == other.nodes_.back();
}

RadialFunction::RadialFunction(MeshPtr mesh)
    : mesh_(std::move(mesh)), values_(mesh_->size(), 0.0) {}

RadialFunction::RadialFunction(MeshPtr mesh, std::vector<double> values)
    : mesh_(std::move(mesh)), values_(std::move(values)) {
  if (values_.size() != mesh_->size())
    throw std::invalid_argument("value count does not match the mesh");
}

double RadialFunction::eval(double r) const {
  const auto& x = mesh_->nodes();
  if (r <= x.front()) return values_.front();
  if (r >= x.back()) return r == x.back() ? values_.back() : 0.0;
  auto it = std::upper_bound(x.begin(), x.end(), r);
  std::size_t i = static_cast<std::size_t>(it - x.begin()) - 1;
  double t = (r - x[i]) / (x[i + 1] - x[i]);
  return values_[i] + t * (values_[i + 1] - values_[i]);
}

double grad_seminorm_sq(const RadialFunction& u) {
  const RadialMesh& m = u.mesh();
  const auto& x = m.nodes();
  double s = 0.0;
  for (std::size_t c = 0; c < m.cells(); ++c) {
    double slope = (u[c + 1] - u[c]) / (x[c + 1] - x[c]);
    s += slope * slope * m.cell_volume(c);
  }
  return m.sphere_area() * s;
}

namespace {

// core of weighted_l2; returns +inf instead of throwing on overflow
double weighted_l2_or_inf(const RadialFunction& u, const Potential& weight,
                          const DualTransform* ft, double k, std::size_t* bad_cell) {
  const RadialMesh& m = u.mesh();
  const auto& x = m.nodes();
  const auto& qr = m.quad_r();
  const auto& qw = m.quad_w();
  double s = 0.0;
  for (std::size_t c = 0; c < m.cells(); ++c) {
    double inv_h = 1.0 / (x[c + 1] - x[c]);
    for (int g = 0; g < 3; ++g) {
      std::size_t j = 3 * c + g;
      double t = (qr[j] - x[c]) * inv_h;
      double val = k * (u[c] + t * (u[c + 1] - u[c]));
      if (val == 0.0) continue;
      double wv = weight.eval(qr[j]);
      double fv = ft ? ft->f(val) : val;
      double term = wv * fv * fv;
      if (wv >= 1e300 || !std::isfinite(term)) {
        if (bad_cell) *bad_cell = c;
        return std::numeric_limits<double>::infinity();
      }
      s += qw[j] * term;
    }
  }
  return m.sphere_area() * s;
}

}  // namespace

double weighted_l2(const RadialFunction& u, const Potential& weight, const DualTransform* ft) {
  std::size_t bad = 0;
  double v = weighted_l2_or_inf(u, weight, ft, 1.0, &bad);
  if (!std::isfinite(v)) {
    std::ostringstream msg;
    msg << "weight overflow at node " << bad << " (r=" << u.mesh().node(bad) << ")";
    throw std::runtime_error(msg.str());
  }
  return v;
}

double orlicz_norm(const RadialFunction& u, const Potential& V, const DualTransform& ft) {
  const double log2 = std::log(2.0);
  double lo = -60.0 * log2, hi = 60.0 * log2;
  auto phi = [&](double logk) {
    double k = std::exp(logk);
    double integral = weighted_l2_or_inf(u, V, &ft, k, nullptr);
    return (1.0 + integral) / k;
  };
  if (!std::isfinite(phi(lo))) throw std::runtime_error("not in E");

  // golden-section on log k; phi is unimodal (ratio of a convex map and k)
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = phi(c), fd = phi(d);
  while (b - a > 1e-10) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = phi(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = phi(d);
    }
  }
  return std::min(fc, fd);
}

double e_norm(const RadialFunction& u, const Potential& V, const DualTransform& ft) {
  return std::sqrt(grad_seminorm_sq(u)) + orlicz_norm(u, V, ft);
}

double sup_decay_check(const RadialFunction& u) {
  double norm = std::sqrt(grad_seminorm_sq(u));
  if (norm == 0.0) throw std::domain_error("sup decay check needs a nonzero function");
  const RadialMesh& m = u.mesh();
  double p = 0.5 * (m.dimension() - 2);
  double worst = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i)
    worst = std::max(worst, std::abs(u[i]) * std::pow(m.node(i), p));
  return worst / norm;
}

void write_csv(const RadialFunction& u, std::ostream& out) {
  out << "r,value\n";
  out.precision(17);
  for (std::size_t i = 0; i < u.size(); ++i) out << u.mesh().node(i) << "," << u[i] << "\n";
}

std::pair<std::vector<double>, std::vector<double>> read_csv(std::istream& in) {
  std::string line;
  std::size_t row = 0;
  std::vector<double> rs, vs;
  while (std::getline(in, line)) {
    ++row;
    if (row == 1) {
      if (line != "r,value" && line != "r,value\r")
        throw CsvError("expected header 'r,value'", row);
      continue;
    }
    if (line.empty() || line == "\r") continue;
    std::size_t comma = line.find(',');
    if (comma == std::string::npos) throw CsvError("missing comma", row);
    try {
      std::size_t used = 0;
      double r = std::stod(line.substr(0, comma), &used);
      double v = std::stod(line.substr(comma + 1), &used);
      rs.push_back(r);
      vs.push_back(v);
    } catch (const std::exception&) {
      throw CsvError("malformed number", row);
    }
  }
  if (rs.empty()) throw CsvError("no data rows", row == 0 ? 1 : row);
  return {std::move(rs), std::move(vs)};
}

}  // namespace qlgs
