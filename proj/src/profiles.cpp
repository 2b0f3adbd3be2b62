#include "qlgs/profiles.hpp"

#include <cmath>

namespace qlgs {

RadialFunction tent_profile(MeshPtr mesh, double a, double b, double height) {
  if (!(0.0 < a && a < b)) throw std::domain_error("tent needs 0 < a < b");
  RadialFunction u(std::move(mesh));
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (std::size_t i = 0; i < u.size(); ++i) {
    double r = u.mesh().node(i);
    double s = 1.0 - std::abs(r - mid) / half;
    u[i] = s > 0.0 ? height * s : 0.0;
  }
  u[u.size() - 1] = 0.0;
  return u;
}

double log_bump_value(double r, double center, double width, double amp) {
  double s = std::log(r / center) / width;
  if (std::abs(s) >= 1.0) return 0.0;
  double q = 1.0 - s * s;
  return amp * q * q * q;
}

RadialFunction log_bump(MeshPtr mesh, double center, double width, double amp) {
  RadialFunction u(std::move(mesh));
  for (std::size_t i = 0; i < u.size(); ++i)
    u[i] = log_bump_value(u.mesh().node(i), center, width, amp);
  u[u.size() - 1] = 0.0;
  return u;
}

RadialFunction power_decay_profile(MeshPtr mesh, double cap) {
  if (!(cap > 0.0)) throw std::domain_error("cap must be positive");
  RadialFunction u(std::move(mesh));
  double p = -0.5 * (u.mesh().dimension() - 2);
  for (std::size_t i = 0; i < u.size(); ++i)
    u[i] = std::pow(std::max(u.mesh().node(i), cap), p);
  u[u.size() - 1] = 0.0;
  return u;
}

RadialFunction random_bump_profile(MeshPtr mesh, std::mt19937_64& rng,
                                   const RandomProfileOptions& opt) {
  std::uniform_int_distribution<int> count(opt.min_bumps, opt.max_bumps);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int n = count(rng);
  RadialFunction u(std::move(mesh));
  for (int b = 0; b < n; ++b) {
    double center = opt.center_lo * std::pow(opt.center_hi / opt.center_lo, unit(rng));
    double width = opt.width_lo * std::pow(opt.width_hi / opt.width_lo, unit(rng));
    double amp = 0.2 + 0.8 * unit(rng);
    if (opt.signed_amplitudes && unit(rng) < 0.5) amp = -amp;
    for (std::size_t i = 0; i < u.size(); ++i)
      u[i] += log_bump_value(u.mesh().node(i), center, width, amp);
  }
  u[u.size() - 1] = 0.0;
  return u;
}

}  // namespace qlgs
