#pragma once

#include <random>

#include "qlgs/radial_mesh.hpp"

namespace qlgs {

// piecewise-linear tent: 0 outside [a, b], peak `height` at the midpoint
RadialFunction tent_profile(MeshPtr mesh, double a, double b, double height);

// smooth compactly supported bump (1 - s^2)^3 with s = ln(r/center)/width
RadialFunction log_bump(MeshPtr mesh, double center, double width, double amp = 1.0);
double log_bump_value(double r, double center, double width, double amp = 1.0);

// near-extremal decay profile max(r, cap)^{-(N-2)/2}, zero at the last node
RadialFunction power_decay_profile(MeshPtr mesh, double cap);

struct RandomProfileOptions {
  int min_bumps = 1;
  int max_bumps = 4;
  bool signed_amplitudes = false;
  double center_lo = 1e-3;
  double center_hi = 1e2;
  double width_lo = 0.3;   // widths in log-r units
  double width_hi = 2.0;
};

// sum of random bumps with log-uniform centers and widths
RadialFunction random_bump_profile(MeshPtr mesh, std::mt19937_64& rng,
                                   const RandomProfileOptions& opt = {});

}  // namespace qlgs
