#include <qlgs/verify.hpp>

#include <qlgs/profiles.hpp>
#include <qlgs/seeding.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace qlgs {
namespace {

// 5 nodes at each end are polluted by the domain truncation
constexpr std::size_t kTrim = 5;

struct NodeDerivs {
  double d1 = 0.0;
  double d2 = 0.0;
};

// second-order stencils on the nonuniform 3-node neighborhood of node i
NodeDerivs stencil(const std::vector<double>& x, const std::vector<double>& v,
                   std::size_t i) {
  const double hm = x[i] - x[i - 1];
  const double hp = x[i + 1] - x[i];
  NodeDerivs d;
  d.d1 = (-hp / (hm * (hm + hp))) * v[i - 1] +
         ((hp - hm) / (hm * hp)) * v[i] +
         (hm / (hp * (hm + hp))) * v[i + 1];
  d.d2 = 2.0 * (hp * v[i - 1] - (hm + hp) * v[i] + hm * v[i + 1]) /
         (hm * hp * (hm + hp));
  return d;
}

void track(ResidualScan& scan, double res, double mag) {
  scan.max_raw = std::max(scan.max_raw, std::abs(res));
  if (mag > 0.0) scan.max_rel = std::max(scan.max_rel, std::abs(res) / mag);
}

// A min/max switch in a weight leaves the solution C^2 but not C^3, so a
// stencil straddling one measures the kink, not discretization quality.
std::vector<double> weight_kinks(const Problem& prob) {
  const RadialMesh& m = prob.mesh();
  std::vector<double> kinks = prob.V().kink_radii(m.r_min(), m.r_max());
  const std::vector<double> kk = prob.K().kink_radii(m.r_min(), m.r_max());
  kinks.insert(kinks.end(), kk.begin(), kk.end());
  std::sort(kinks.begin(), kinks.end());
  return kinks;
}

bool straddles_kink(const std::vector<double>& kinks,
                    const std::vector<double>& x, std::size_t i) {
  const auto it = std::lower_bound(kinks.begin(), kinks.end(), x[i - 1]);
  return it != kinks.end() && *it <= x[i + 1];
}

double bump_value(double r, const TestBump& b) {
  const double s = std::log(r / b.center) / b.width;
  if (std::abs(s) >= 1.0) return 0.0;
  const double a = 1.0 - s * s;
  return a * a * a;
}

double bump_slope(double r, const TestBump& b) {
  const double s = std::log(r / b.center) / b.width;
  if (std::abs(s) >= 1.0) return 0.0;
  const double a = 1.0 - s * s;
  return -6.0 * s * a * a / (r * b.width);
}

}  // namespace

ResidualScan dual_ode_scan(const RadialFunction& u, const Problem& prob,
                           const std::function<double(double)>& source) {
  const RadialMesh& m = prob.mesh();
  const auto& x = m.nodes();
  const auto& v = u.values();
  const double dim = m.dimension();
  const DualTransform& ft = prob.transform();
  const std::vector<double> kinks = weight_kinks(prob);
  ResidualScan scan;
  for (std::size_t i = kTrim; i + kTrim < m.size(); ++i) {
    if (straddles_kink(kinks, x, i)) continue;
    const NodeDerivs d = stencil(x, v, i);
    const double r = x[i];
    const double fu = ft.f(v[i]);
    const double fp = ft.f_prime(v[i]);
    const double conv = (dim - 1.0) / r * d.d1;
    const double tV = prob.V().eval(r) * fu * fp;
    const double tK = prob.K().eval(r) * g_eval(prob.nonlinearity(), fu) * fp;
    const double tS = source ? source(r) : 0.0;
    track(scan, d.d2 + conv - tV + tK - tS,
          std::abs(d.d2) + std::abs(conv) + std::abs(tV) + std::abs(tK) +
              std::abs(tS));
  }
  return scan;
}

double dual_ode_residual(const RadialFunction& u, const Problem& prob) {
  return dual_ode_scan(u, prob).max_rel;
}

ResidualScan original_equation_scan(const RadialFunction& w, const Problem& prob,
                                    const std::function<double(double)>& source) {
  const RadialMesh& m = prob.mesh();
  const auto& x = m.nodes();
  const auto& v = w.values();
  const double dim = m.dimension();
  const std::vector<double> kinks = weight_kinks(prob);
  ResidualScan scan;
  for (std::size_t i = kTrim; i + kTrim < m.size(); ++i) {
    if (straddles_kink(kinks, x, i)) continue;
    const NodeDerivs d = stencil(x, v, i);
    const double r = x[i];
    const double wv = v[i];
    const double coef = 1.0 + 2.0 * wv * wv;
    const double t1 = coef * d.d2;
    const double t2 = coef * (dim - 1.0) / r * d.d1;
    const double t3 = 2.0 * wv * d.d1 * d.d1;
    const double t4 = prob.V().eval(r) * wv;
    const double t5 = prob.K().eval(r) * g_eval(prob.nonlinearity(), wv);
    const double tS = source ? source(r) : 0.0;
    track(scan, -t1 - t2 - t3 + t4 - t5 - tS,
          std::abs(t1) + std::abs(t2) + std::abs(t3) + std::abs(t4) +
              std::abs(t5) + std::abs(tS));
  }
  return scan;
}

double original_equation_residual(const RadialFunction& w, const Problem& prob) {
  return original_equation_scan(w, prob).max_rel;
}

double back_transform_identity_residual(const RadialFunction& w,
                                        const RadialFunction& u,
                                        const DualTransform& ft) {
  const RadialMesh& m = u.mesh();
  if (!m.same_as(w.mesh()))
    throw std::invalid_argument("identity check needs matching meshes");
  const auto& x = m.nodes();
  const double dim = m.dimension();
  std::vector<double> w2(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) w2[i] = w[i] * w[i];
  double worst = 0.0;
  for (std::size_t i = kTrim; i + kTrim < m.size(); ++i) {
    const double r = x[i];
    const NodeDerivs dw = stencil(x, w.values(), i);
    const NodeDerivs dw2 = stencil(x, w2, i);
    const NodeDerivs du = stencil(x, u.values(), i);
    const double lap_w = dw.d2 + (dim - 1.0) / r * dw.d1;
    const double lap_w2 = dw2.d2 + (dim - 1.0) / r * dw2.d1;
    const double lap_u = du.d2 + (dim - 1.0) / r * du.d1;
    const double lhs = lap_w + w[i] * lap_w2;
    const double rhs = lap_u / ft.f_prime(u[i]);
    const double mag = std::abs(lhs) + std::abs(rhs);
    if (mag > 0.0) worst = std::max(worst, std::abs(lhs - rhs) / mag);
  }
  return worst;
}

std::vector<TestBump> default_test_battery() {
  std::vector<TestBump> battery;
  for (int k = -5; k <= 6; ++k)
    battery.push_back({std::ldexp(1.0, k), std::log(4.0)});
  return battery;
}

double weak_form_defect(const RadialFunction& w, const Problem& prob,
                        const std::vector<TestBump>& battery) {
  if (battery.empty()) throw std::invalid_argument("test battery is empty");
  const RadialMesh& m = prob.mesh();
  const auto& x = m.nodes();
  const auto& qr = m.quad_r();
  const auto& qw = m.quad_w();
  const double omega = m.sphere_area();
  double worst = 0.0;
  std::size_t used = 0;
  for (const TestBump& b : battery) {
    // the identity needs h supported inside the mesh interval; a bump
    // overhanging either end would pick up the missing boundary flux
    if (b.center * std::exp(-b.width) < m.r_min() ||
        b.center * std::exp(b.width) > m.r_max())
      continue;
    ++used;
    double t_grad = 0.0, t_curv = 0.0, t_pot = 0.0, t_rhs = 0.0;
    for (std::size_t c = 0; c < m.cells(); ++c) {
      const double slope = (w[c + 1] - w[c]) / (x[c + 1] - x[c]);
      for (std::size_t j = 3 * c; j < 3 * c + 3; ++j) {
        const double r = qr[j];
        const double h = bump_value(r, b);
        const double hp = bump_slope(r, b);
        if (h == 0.0 && hp == 0.0) continue;
        const double wq = w[c] + slope * (r - x[c]);
        const double wt = omega * qw[j];
        t_grad += wt * (1.0 + 2.0 * wq * wq) * slope * hp;
        t_curv += wt * 2.0 * wq * slope * slope * h;
        t_pot += wt * prob.V().eval(r) * wq * h;
        t_rhs += wt * prob.K().eval(r) * g_eval(prob.nonlinearity(), wq) * h;
      }
    }
    const double mag =
        std::abs(t_grad) + std::abs(t_curv) + std::abs(t_pot) + std::abs(t_rhs);
    if (mag > 0.0)
      worst = std::max(worst, std::abs(t_grad + t_curv + t_pot - t_rhs) / mag);
  }
  if (used == 0)
    throw std::invalid_argument("no test bump fits inside the mesh interval");
  return worst;
}

double decay_library_constant(const MeshPtr& mesh) {
  double best = 0.0;
  auto consider = [&best](const RadialFunction& p) {
    best = std::max(best, sup_decay_check(p));
  };
  // inverse-power profiles saturate the radial sup bound as the cap shrinks
  const double inv = -(mesh->dimension() - 2.0);
  for (double cap : {1e-3, 1e-1, 10.0}) {
    std::vector<double> v(mesh->size());
    for (std::size_t i = 0; i < v.size(); ++i)
      v[i] = std::pow(std::max(mesh->node(i), cap), inv);
    consider(RadialFunction(mesh, std::move(v)));
  }
  consider(power_decay_profile(mesh, 1e-2));
  consider(tent_profile(mesh, 1.0, 2.0, 3.0));
  std::mt19937_64 rng(7777);
  for (int i = 0; i < 16; ++i) consider(random_bump_profile(mesh, rng));
  return best;
}

RateFit embedding_rate_fit(const Rational& q, const Envelope& env, RateSide side,
                           MeshPtr mesh, const Potential& V, const Potential& K,
                           const DualTransform& ft, int samples,
                           std::uint64_t seed) {
  const int N = mesh->dimension();
  RateFit fit;
  fit.delta_predicted = side == RateSide::zero
                            ? delta_rate_zero(q, env, N)
                            : delta_rate_infinity(q, env, N);
  for (int k = 0; k < 8; ++k)
    fit.radii.push_back(std::ldexp(1.0, side == RateSide::zero ? k - 7 : k));
  fit.s_estimate.assign(fit.radii.size(), 0.0);

  const double qd = to_double(q);
  const auto& x = mesh->nodes();
  const auto& qr = mesh->quad_r();
  const auto& qw = mesh->quad_w();
  std::vector<double> Kq(qr.size());
  for (std::size_t j = 0; j < qr.size(); ++j) Kq[j] = K.eval(qr[j]);
  const double omega = mesh->sphere_area();

  std::vector<double> prefix(qr.size());
  auto accumulate = [&](const RadialFunction& p) {
    const double nrm = e_norm(p, V, ft);
    if (!(nrm > 0.0) || !std::isfinite(nrm)) return;
    double running = 0.0;
    for (std::size_t c = 0; c < mesh->cells(); ++c) {
      const double slope = (p[c + 1] - p[c]) / ((x[c + 1] - x[c]) * nrm);
      const double base = p[c] / nrm;
      for (std::size_t j = 3 * c; j < 3 * c + 3; ++j) {
        const double val = base + slope * (qr[j] - x[c]);
        running += omega * qw[j] * Kq[j] * std::pow(std::abs(val), qd);
        prefix[j] = running;
      }
    }
    for (std::size_t k = 0; k < fit.radii.size(); ++k) {
      const auto it = std::upper_bound(qr.begin(), qr.end(), fit.radii[k]);
      const double below = it == qr.begin() ? 0.0 : prefix[(it - qr.begin()) - 1];
      const double s =
          side == RateSide::zero ? below : prefix.back() - below;
      fit.s_estimate[k] = std::max(fit.s_estimate[k], s);
    }
  };

  for (int i = 0; i < samples; ++i) {
    std::mt19937_64 rng(sample_seed(seed, static_cast<std::uint64_t>(i)));
    accumulate(random_bump_profile(mesh, rng));
  }
  accumulate(power_decay_profile(mesh, mesh->node(8)));

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int npts = 0;
  for (std::size_t k = 0; k < fit.radii.size(); ++k) {
    if (!(fit.s_estimate[k] > 0.0)) continue;
    const double lx = std::log(fit.radii[k]);
    const double ly = std::log(fit.s_estimate[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++npts;
  }
  if (npts < 2)
    throw std::runtime_error("rate fit degenerate: restricted norms vanish");
  fit.delta_hat = (npts * sxy - sx * sy) / (npts * sxx - sx * sx);
  return fit;
}

ResidualReport verify_solution(const RadialFunction& u, const RadialFunction& w,
                               const Problem& prob) {
  ResidualReport rep;
  rep.dual_ode = dual_ode_scan(u, prob);
  rep.original = original_equation_scan(w, prob);
  rep.identity_max_rel = back_transform_identity_residual(w, u, prob.transform());
  rep.weak_form_max_defect = weak_form_defect(w, prob);
  rep.decay_ratio = sup_decay_check(u);
  rep.decay_library_max = decay_library_constant(prob.mesh_ptr());
  return rep;
}

}  // namespace qlgs
