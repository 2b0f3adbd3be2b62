#include <qlgs/cli.hpp>

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>

int main(int argc, char** argv) {
  CLI::App app{"radial quasilinear ground-state toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int threads = 0;
  bool force = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "configuration file")
        ->required();
    cmd->add_option("--out", out_dir, "output directory (overrides config)");
    cmd->add_option("--seed", seed, "RNG seed (overrides config)")
        ->each([&](const std::string&) { seed_given = true; });
    cmd->add_option("--threads", threads,
                    "cap worker threads (this build computes serially)");
    return cmd;
  };

  add_common(app.add_subcommand("check", "decide exponent admissibility"));
  add_common(app.add_subcommand("solve", "run the mountain-pass solver"))
      ->add_flag("--force", force, "attempt the solve even when the "
                                   "hypotheses fail");
  add_common(app.add_subcommand("verify", "residual suite on a solution"));
  add_common(app.add_subcommand("rates", "embedding decay-rate fits"));

  CLI11_PARSE(app, argc, argv);

  qlgs::CliOverrides ov;
  ov.out_dir = out_dir;
  if (seed_given) ov.seed = seed;
  ov.threads = threads;
  ov.force = force;

  const std::string cmd = app.get_subcommands().front()->get_name();
  return qlgs::run_command(cmd, config_path, ov, std::cout, std::cerr);
}
