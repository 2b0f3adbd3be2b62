#pragma once

#include <qlgs/exponents.hpp>
#include <qlgs/mountain_pass.hpp>
#include <qlgs/nonlinearity.hpp>
#include <qlgs/potentials.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qlgs {

// Parse failure with a 1-based location; line 0 means the file as a whole
// (for example a missing required key).
struct ConfigError : std::runtime_error {
  ConfigError(const std::string& what, std::size_t line, std::size_t col)
      : std::runtime_error(what), line(line), col(col) {}
  std::size_t line;
  std::size_t col;
};

struct MeshConfig {
  int nodes = 2000;
  double r_min = 1e-6;
  double r_max = 1e3;
};

// Thresholds for the verification command.  The residual-order window is
// given as an order p and applied as a factor-2^p ratio test per halving.
struct VerifyConfig {
  double grad_norm_max = 1e-10;
  double weak_defect_max = 1e-6;
  double min_nodal = -1e-12;
  double order_min = 1.7;
  double order_max = 2.3;
  int refine_levels = 3;      // halvings stacked on the base mesh
  double decay_margin = 1.05;
};

struct RatesConfig {
  int samples = 64;
  std::uint64_t seed = 1;
};

// Full effective run configuration: file values merged with defaults.
// Every field is echoed into emitted reports.
struct RunConfig {
  int dimension = 0;  // required, >= 3
  Potential V;        // required
  Potential K;        // required
  bool has_nonlinearity = false;
  NonlinearitySpec g;
  std::vector<Envelope> env_zero;
  std::vector<Envelope> env_infinity;
  MeshConfig mesh;
  SolveOptions solver;
  VerifyConfig verify;
  RatesConfig rates;
  std::string output = "out";
  int threads = 1;
  bool force = false;  // set from the command line, not the file
};

// Flat key = value text with [section] headers.  '#' starts a comment.
// Expressions are double-quoted: V = "min(r^3, 1)".  Each [envelope.zero]
// or [envelope.infinity] header declares one more envelope for that end.
// Unknown sections, unknown keys, duplicate keys, and malformed values all
// throw ConfigError with the offending position.
RunConfig parse_config(std::string_view text);

}  // namespace qlgs
