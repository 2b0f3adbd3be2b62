#include <qlgs/energy.hpp>

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace qlgs {
namespace {

[[noreturn]] void throw_overflow(const RadialMesh& mesh, std::size_t cell) {
  std::ostringstream msg;
  msg << "weight overflow at node " << cell << " (r=" << mesh.node(cell)
      << ")";
  throw std::runtime_error(msg.str());
}

}  // namespace

Problem::Problem(MeshPtr mesh, Potential V, Potential K, NonlinearitySpec g,
                 DualTransform ft)
    : mesh_(std::move(mesh)),
      V_(std::move(V)),
      K_(std::move(K)),
      g_(std::move(g)),
      ft_(ft) {
  g_.validate();
  if (!V_.nonnegative())
    throw std::invalid_argument("V must be nonnegative on (0, inf)");
  if (!K_.strictly_positive())
    throw std::invalid_argument("K must be strictly positive on (0, inf)");
  const auto& qr = mesh_->quad_r();
  Vq_.resize(qr.size());
  Kq_.resize(qr.size());
  for (std::size_t j = 0; j < qr.size(); ++j) {
    Vq_[j] = V_.eval(qr[j]);
    Kq_[j] = K_.eval(qr[j]);
  }
}

// Same loop shape and summation order as the mesh-level weighted integral,
// so the two agree bit for bit.
double Problem::potential_term(const RadialFunction& u) const {
  const auto& x = mesh_->nodes();
  const auto& qr = mesh_->quad_r();
  const auto& qw = mesh_->quad_w();
  double s = 0.0;
  for (std::size_t c = 0; c < mesh_->cells(); ++c) {
    const double inv_h = 1.0 / (x[c + 1] - x[c]);
    for (int g = 0; g < 3; ++g) {
      const std::size_t j = 3 * c + g;
      const double t = (qr[j] - x[c]) * inv_h;
      const double val = u[c] + t * (u[c + 1] - u[c]);
      if (val == 0.0) continue;
      const double wv = Vq_[j];
      const double fv = ft_.f(val);
      const double term = wv * fv * fv;
      if (wv >= 1e300 || !std::isfinite(term)) throw_overflow(*mesh_, c);
      s += qw[j] * term;
    }
  }
  return mesh_->sphere_area() * s;
}

double Problem::nonlinear_term(const RadialFunction& u) const {
  if (g_.is_zero()) return 0.0;
  const auto& x = mesh_->nodes();
  const auto& qr = mesh_->quad_r();
  const auto& qw = mesh_->quad_w();
  double s = 0.0;
  for (std::size_t c = 0; c < mesh_->cells(); ++c) {
    const double inv_h = 1.0 / (x[c + 1] - x[c]);
    for (int g = 0; g < 3; ++g) {
      const std::size_t j = 3 * c + g;
      const double t = (qr[j] - x[c]) * inv_h;
      const double val = u[c] + t * (u[c + 1] - u[c]);
      if (val == 0.0) continue;
      const double kv = Kq_[j];
      const double term = kv * G_eval(g_, ft_.f(val));
      if (kv >= 1e300 || !std::isfinite(term)) throw_overflow(*mesh_, c);
      s += qw[j] * term;
    }
  }
  return mesh_->sphere_area() * s;
}

double Problem::I(const RadialFunction& u) const {
  return 0.5 * grad_seminorm_sq(u) + 0.5 * potential_term(u) -
         nonlinear_term(u);
}

double Problem::J(const RadialFunction& u) const {
  return 0.5 * grad_seminorm_sq(u) + 0.5 * potential_term(u);
}

RadialFunction Problem::gradient(const RadialFunction& u) const {
  const auto& x = mesh_->nodes();
  const auto& qr = mesh_->quad_r();
  const auto& qw = mesh_->quad_w();
  const bool zero_g = g_.is_zero();
  std::vector<double> grad(mesh_->size(), 0.0);
  for (std::size_t c = 0; c < mesh_->cells(); ++c) {
    const double h = x[c + 1] - x[c];
    const double slope = (u[c + 1] - u[c]) / h;
    const double stiff = slope * mesh_->cell_volume(c) / h;
    grad[c] -= stiff;
    grad[c + 1] += stiff;
    for (int g = 0; g < 3; ++g) {
      const std::size_t j = 3 * c + g;
      const double t = (qr[j] - x[c]) / h;
      const double val = u[c] + t * (u[c + 1] - u[c]);
      if (val == 0.0) continue;
      if (Vq_[j] >= 1e300 || Kq_[j] >= 1e300) throw_overflow(*mesh_, c);
      const auto fw = ft_.f_with_prime(val);
      const double dens =
          Vq_[j] * fw.w * fw.fp -
          (zero_g ? 0.0 : Kq_[j] * g_eval(g_, fw.w) * fw.fp);
      if (!std::isfinite(dens)) throw_overflow(*mesh_, c);
      grad[c] += qw[j] * dens * (1.0 - t);
      grad[c + 1] += qw[j] * dens * t;
    }
  }
  const double area = mesh_->sphere_area();
  for (double& v : grad) v *= area;
  return RadialFunction(mesh_, std::move(grad));
}

void Problem::hessian(const RadialFunction& u, std::vector<double>& sub,
                      std::vector<double>& diag,
                      std::vector<double>& sup) const {
  const auto& x = mesh_->nodes();
  const auto& qr = mesh_->quad_r();
  const auto& qw = mesh_->quad_w();
  const bool zero_g = g_.is_zero();
  const double area = mesh_->sphere_area();
  const std::size_t n = mesh_->size();
  sub.assign(n - 1, 0.0);
  diag.assign(n, 0.0);
  sup.assign(n - 1, 0.0);
  for (std::size_t c = 0; c < mesh_->cells(); ++c) {
    const double h = x[c + 1] - x[c];
    const double a = area * mesh_->cell_volume(c) / (h * h);
    diag[c] += a;
    diag[c + 1] += a;
    sub[c] -= a;
    sup[c] -= a;
    for (int g = 0; g < 3; ++g) {
      const std::size_t j = 3 * c + g;
      const double t = (qr[j] - x[c]) / h;
      const double val = u[c] + t * (u[c + 1] - u[c]);
      const auto fw = ft_.f_with_prime(val);
      const double fs = -2.0 * fw.w * fw.fp * fw.fp * fw.fp * fw.fp;
      double dens = Vq_[j] * (fw.fp * fw.fp + fw.w * fs);
      if (!zero_g) {
        dens -= Kq_[j] *
                (g_prime(g_, fw.w) * fw.fp * fw.fp + g_eval(g_, fw.w) * fs);
      }
      if (!std::isfinite(dens)) throw_overflow(*mesh_, c);
      const double m = area * qw[j] * dens;
      diag[c] += m * (1.0 - t) * (1.0 - t);
      diag[c + 1] += m * t * t;
      sub[c] += m * t * (1.0 - t);
      sup[c] += m * t * (1.0 - t);
    }
  }
}

double I_eval(const RadialFunction& u, const Potential& V, const Potential& K,
              const NonlinearitySpec& g, const DualTransform& ft) {
  return Problem(u.mesh_ptr(), V, K, g, ft).I(u);
}

RadialFunction I_gradient(const RadialFunction& u, const Potential& V,
                          const Potential& K, const NonlinearitySpec& g,
                          const DualTransform& ft) {
  return Problem(u.mesh_ptr(), V, K, g, ft).gradient(u);
}

double J_eval(const RadialFunction& u, const Potential& V,
              const DualTransform& ft) {
  return Problem(u.mesh_ptr(), V, Potential::constant(1.0),
                 NonlinearitySpec::zero(), ft)
      .J(u);
}

double nodal_norm(const RadialFunction& grad) {
  double s = 0.0;
  for (double v : grad.values()) s += v * v;
  return std::sqrt(s);
}

}  // namespace qlgs
