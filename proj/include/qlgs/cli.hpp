#pragma once

#include <qlgs/config.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace qlgs {

// Command-line overrides applied on top of the parsed config file.
struct CliOverrides {
  std::string out_dir;                // empty keeps the config value
  std::optional<std::uint64_t> seed;  // overrides solver and rates seeds
  int threads = 0;                    // 0 keeps the config value
  bool force = false;
};

// Exit-code contract shared by all commands:
//   0 success, 1 operational error (parse, IO, solver failure),
//   2 hypothesis or triviality failure (inadmissible exponents,
//     failed verification thresholds, zero profile).
int run_check(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int run_solve(RunConfig cfg, std::ostream& out, std::ostream& err);
int run_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int run_rates(const RunConfig& cfg, std::ostream& out, std::ostream& err);

// Loads and parses the config file, applies overrides, dispatches.
// command is one of check / solve / verify / rates.
int run_command(const std::string& command, const std::string& config_path,
                const CliOverrides& ov, std::ostream& out, std::ostream& err);

}  // namespace qlgs
