#include <qlgs/cli.hpp>

#include <qlgs/mountain_pass.hpp>
#include <qlgs/reports.hpp>
#include <qlgs/verify.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

namespace fs = std::filesystem;

namespace qlgs {
namespace {

bool ensure_dir(const std::string& dir, std::ostream& err) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    err << "error: cannot create output directory '" << dir
        << "': " << ec.message() << "\n";
    return false;
  }
  return true;
}

bool write_file(const fs::path& p, const std::string& content,
                std::ostream& err) {
  std::ofstream f(p);
  f << content;
  f.flush();
  if (!f) {
    err << "error: cannot write '" << p.string() << "'\n";
    return false;
  }
  return true;
}

std::string csv_of(const RadialFunction& u) {
  std::ostringstream s;
  write_csv(u, s);
  return s.str();
}

std::string json_text(const Json& j) { return j.dump(2) + "\n"; }

double free_grad_norm(const Problem& prob, const RadialFunction& u) {
  const RadialFunction g = prob.gradient(u);
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < g.size(); ++i) s += g[i] * g[i];
  return std::sqrt(s);
}

std::string sci(double x, int prec = 3) {
  std::ostringstream s;
  s << std::scientific << std::setprecision(prec) << x;
  return s.str();
}

std::string fixed6(double x) {
  std::ostringstream s;
  s << std::setprecision(6) << x;
  return s.str();
}

// missing sections are operational errors, not hypothesis failures
bool require_check_inputs(const RunConfig& cfg, std::ostream& err) {
  if (!cfg.has_nonlinearity) {
    err << "error: config has no [nonlinearity] section\n";
    return false;
  }
  if (cfg.env_zero.empty()) {
    err << "error: config declares no [envelope.zero] section\n";
    return false;
  }
  if (cfg.env_infinity.empty()) {
    err << "error: config declares no [envelope.infinity] section\n";
    return false;
  }
  return true;
}

void print_check_table(const AdmissibilityReport& rep, const RunConfig& cfg,
                       std::ostream& out) {
  out << "admissibility check (N = " << rep.N << ")\n";
  out << "  V = " << cfg.V.text() << "\n";
  out << "  K = " << cfg.K.text() << "\n";
  auto env_line = [&](const char* where, const Envelope& e) {
    out << "  envelope at " << where << ": ";
    if (e.alpha_any)
      out << "alpha = any";
    else
      out << "alpha = " << to_string(e.alpha);
    out << ", beta = " << to_string(e.beta) << "\n";
  };
  env_line("0  ", rep.env0_used);
  env_line("inf", rep.envInf_used);
  out << "  alpha*(beta_0) = " << to_string(rep.alpha_star_0) << "\n";
  out << "  q0*     = "
      << (rep.q0_star_infinite ? std::string("inf") : to_string(rep.q0_star))
      << "\n";
  out << "  q_inf*  = " << to_string(rep.q_inf_star) << "\n";
  if (rep.single_power) {
    out << "  q admissible interval: " << to_string(rep.q_single) << "\n";
    out << "  q = " << to_string(rep.q1) << ", theta = " << to_string(rep.theta)
        << "\n";
  } else {
    out << "  q1 admissible interval: " << to_string(rep.q1_existence) << "\n";
    out << "  q2 strict lower bound:  " << to_string(rep.q2_lower) << "\n";
    out << "  q1 = " << to_string(rep.q1) << ", q2 = " << to_string(rep.q2)
        << ", theta = " << to_string(rep.theta) << "\n";
  }
  out << "  result: " << rep.message << "\n";
  for (const std::string& r : rep.reasons) out << "    - " << r << "\n";
}

struct LoadedProfile {
  RadialFunction u;
  bool ok = false;
};

LoadedProfile load_profile(const fs::path& file, const MeshPtr& mesh,
                           std::ostream& err) {
  LoadedProfile res{RadialFunction(mesh), false};
  std::ifstream f(file);
  if (!f) {
    err << "error: cannot open '" << file.string() << "'\n";
    return res;
  }
  std::vector<double> rs, vs;
  try {
    std::tie(rs, vs) = read_csv(f);
  } catch (const CsvError& e) {
    err << "error: " << file.string() << " row " << e.row << ": " << e.what()
        << "\n";
    return res;
  }
  if (rs.size() != mesh->size()) {
    err << "error: " << file.string() << " has " << rs.size()
        << " rows but the configured mesh has " << mesh->size() << " nodes\n";
    return res;
  }
  for (std::size_t i = 0; i < rs.size(); ++i) {
    const double node = mesh->node(i);
    if (std::abs(rs[i] - node) > 1e-9 * std::max(1.0, std::abs(node))) {
      err << "error: " << file.string() << " row " << i + 2
          << ": radius " << rs[i] << " does not match mesh node " << node
          << "\n";
      return res;
    }
  }
  res.u = RadialFunction(mesh, std::move(vs));
  res.ok = true;
  return res;
}

}  // namespace

int run_check(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (!require_check_inputs(cfg, err)) return 1;
  const AdmissibilityReport rep =
      existence_check(cfg.env_zero, cfg.env_infinity, cfg.g.q1, cfg.g.q2,
                      cfg.g.theta, cfg.dimension);
  print_check_table(rep, cfg, out);
  if (!ensure_dir(cfg.output, err)) return 1;
  if (!write_file(fs::path(cfg.output) / "check_report.json",
                  json_text(report_envelope("check", cfg,
                                            admissibility_json(rep))),
                  err))
    return 1;
  return rep.existence_ok ? 0 : 2;
}

int run_solve(RunConfig cfg, std::ostream& out, std::ostream& err) {
  bool admissible = false, hypotheses_known = false;
  if (cfg.has_nonlinearity && !cfg.env_zero.empty() &&
      !cfg.env_infinity.empty()) {
    const AdmissibilityReport rep =
        existence_check(cfg.env_zero, cfg.env_infinity, cfg.g.q1, cfg.g.q2,
                        cfg.g.theta, cfg.dimension);
    admissible = rep.existence_ok;
    hypotheses_known = true;
    if (!admissible && !cfg.force) {
      out << "inadmissible: "
          << (rep.reasons.empty() ? rep.message : rep.reasons.front()) << "\n";
      out << "rerun with --force to attempt the solve anyway\n";
      if (ensure_dir(cfg.output, err))
        write_file(fs::path(cfg.output) / "check_report.json",
                   json_text(report_envelope("check", cfg,
                                             admissibility_json(rep))),
                   err);
      return 2;
    }
  } else if (!cfg.force) {
    require_check_inputs(cfg, err);
    return 1;
  }

  if (!ensure_dir(cfg.output, err)) return 1;
  const fs::path dir(cfg.output);

  MeshPtr mesh;
  try {
    mesh = std::make_shared<const RadialMesh>(cfg.dimension, cfg.mesh.r_min,
                                              cfg.mesh.r_max, cfg.mesh.nodes);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  SolveReport rep(mesh);
  try {
    Problem prob(mesh, cfg.V, cfg.K, cfg.g);
    rep = solve(prob, cfg.solver);
    rep.outside_hypotheses = cfg.force && !(hypotheses_known && admissible);
    if (rep.converged) {
      const double dual = dual_ode_residual(rep.u, prob);
      const double weak = weak_form_defect(rep.w, prob);
      std::ostringstream rs;
      rs << "dual ODE max rel " << sci(dual) << "; weak-form defect "
         << sci(weak) << " on the solve mesh";
      rep.residual_summary = rs.str();
    }
  } catch (const SolverDivergence& d) {
    err << "error: solver diverged: " << d.what() << "\n";
    write_file(dir / "u.csv", csv_of(d.iterate), err);
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  std::ostringstream hist;
  hist << "iter,max_energy,grad_norm\n";
  hist.precision(17);
  for (const IterRecord& r : rep.history)
    hist << r.iter << "," << r.max_energy << "," << r.grad_norm << "\n";

  bool io_ok = write_file(dir / "u.csv", csv_of(rep.u), err);
  io_ok = write_file(dir / "w.csv", csv_of(rep.w), err) && io_ok;
  io_ok = write_file(dir / "history.csv", hist.str(), err) && io_ok;
  io_ok = write_file(dir / "solve_report.json",
                     json_text(report_envelope("solve", cfg, solve_json(rep))),
                     err) &&
          io_ok;
  if (!io_ok) return 1;

  out << "solve: N = " << cfg.dimension << ", V = " << cfg.V.text()
      << ", K = " << cfg.K.text() << ", g = " << cfg.g.describe() << "\n";
  if (rep.outside_hypotheses) out << "  outside theorem hypotheses (forced)\n";
  out << "  endpoint lambda = " << rep.lambda << "\n";
  out << "  certificate: alpha_hat = " << fixed6(rep.certificate.alpha_hat)
      << " at rho = " << sci(rep.certificate.rho) << " ("
      << rep.certificate.samples << " samples)\n";
  out << "  deformation: " << rep.deform_iterations << " iterations\n";
  out << "  refine: " << rep.refine_iterations
      << " iterations, gradient norm " << sci(rep.grad_norm) << "\n";
  out << "  I = " << fixed6(rep.I) << ", J = " << fixed6(rep.J)
      << ", min nodal = " << sci(rep.min_nodal) << "\n";
  if (!rep.residual_summary.empty())
    out << "  " << rep.residual_summary << "\n";
  out << "  converged: " << (rep.converged ? "yes" : "no") << "\n";
  out << "  wrote " << (dir / "u.csv").string() << " "
      << (dir / "w.csv").string() << " " << (dir / "history.csv").string()
      << " " << (dir / "solve_report.json").string() << "\n";
  return rep.converged ? 0 : 1;
}

int run_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (!cfg.has_nonlinearity) {
    err << "error: config has no [nonlinearity] section\n";
    return 1;
  }
  MeshPtr mesh;
  try {
    mesh = std::make_shared<const RadialMesh>(cfg.dimension, cfg.mesh.r_min,
                                              cfg.mesh.r_max, cfg.mesh.nodes);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  const fs::path dir(cfg.output);
  const LoadedProfile lu = load_profile(dir / "u.csv", mesh, err);
  if (!lu.ok) return 1;
  const RadialFunction& u = lu.u;

  bool all_zero = true;
  for (std::size_t i = 0; i < u.size(); ++i)
    if (u[i] != 0.0) all_zero = false;
  if (all_zero) {
    out << "trivial solution\n";
    return 2;
  }

  try {
    Problem prob(mesh, cfg.V, cfg.K, cfg.g);

    RadialFunction w(mesh);
    for (std::size_t i = 0; i < w.size(); ++i)
      w[i] = prob.transform().f(u[i]);
    if (fs::exists(dir / "w.csv")) {
      const LoadedProfile lw = load_profile(dir / "w.csv", mesh, err);
      if (!lw.ok) return 1;
      for (std::size_t i = 0; i < w.size(); ++i)
        if (std::abs(lw.u[i] - w[i]) >
            1e-9 * std::max(1.0, std::abs(w[i]))) {
          err << "error: w.csv is not the transform of u.csv (node " << i
              << ")\n";
          return 1;
        }
    }

    const ResidualReport base = verify_solution(u, w, prob);
    const double grad = free_grad_norm(prob, u);
    const double energy = prob.I(u);
    const double minn =
        *std::min_element(u.values().begin(), u.values().end());

    const VerifyConfig& vc = cfg.verify;
    const double ratio_lo = std::exp2(vc.order_min);
    const double ratio_hi = std::exp2(vc.order_max);

    struct Level {
      int nodes = 0;
      double dual = 0.0, weak = 0.0, grad = 0.0, ratio = 0.0;
    };
    std::vector<Level> levels;
    RadialFunction cur = u;
    double prev_dual = base.dual_ode.max_rel;
    double finest_weak = base.weak_form_max_defect;
    for (int k = 1; k <= vc.refine_levels; ++k) {
      const long long n = static_cast<long long>(cfg.mesh.nodes) << k;
      if (n > 2000000) break;
      auto fine_mesh = std::make_shared<const RadialMesh>(
          cfg.dimension, cfg.mesh.r_min, cfg.mesh.r_max, static_cast<int>(n));
      Problem fine(fine_mesh, cfg.V, cfg.K, cfg.g);
      const RefineResult rr = refine_on_mesh(cur, fine);
      Level lv;
      lv.nodes = static_cast<int>(n);
      lv.dual = dual_ode_residual(rr.u, fine);
      RadialFunction wf(fine_mesh);
      for (std::size_t i = 0; i < wf.size(); ++i)
        wf[i] = fine.transform().f(rr.u[i]);
      lv.weak = weak_form_defect(wf, fine);
      lv.grad = rr.grad_norm;
      lv.ratio = prev_dual / lv.dual;
      levels.push_back(lv);
      prev_dual = lv.dual;
      finest_weak = lv.weak;
      cur = rr.u;
    }

    const bool grad_ok = grad <= vc.grad_norm_max;
    const bool energy_ok = energy > 0.0;
    const bool nodal_ok = minn >= vc.min_nodal;
    bool order_ok = true;
    for (const Level& lv : levels)
      order_ok = order_ok && lv.ratio >= ratio_lo && lv.ratio <= ratio_hi;
    const bool weak_ok = finest_weak <= vc.weak_defect_max;
    const bool decay_ok =
        base.decay_ratio <= vc.decay_margin * base.decay_library_max;
    const bool passed =
        grad_ok && energy_ok && nodal_ok && order_ok && weak_ok && decay_ok;

    auto pf = [](bool ok) { return ok ? "PASS" : "FAIL"; };
    out << "verify: " << mesh->size() << " nodes on [" << mesh->r_min()
        << ", " << mesh->r_max() << "], N = " << cfg.dimension << "\n";
    out << "  gradient norm     " << sci(grad) << "  (max "
        << sci(vc.grad_norm_max, 0) << ")  " << pf(grad_ok) << "\n";
    out << "  energy I          " << fixed6(energy) << "  (must be > 0)  "
        << pf(energy_ok) << "\n";
    out << "  min nodal value   " << sci(minn) << "  (min "
        << sci(vc.min_nodal, 0) << ")  " << pf(nodal_ok) << "\n";
    out << "  decay ratio       " << fixed6(base.decay_ratio) << "  (max "
        << fixed6(vc.decay_margin) << " x " << fixed6(base.decay_library_max)
        << ")  " << pf(decay_ok) << "\n";
    out << "  dual ODE residual " << sci(base.dual_ode.max_rel)
        << " max rel\n";
    out << "  original residual " << sci(base.original.max_rel)
        << " max rel\n";
    out << "  identity residual " << sci(base.identity_max_rel) << "\n";
    if (!levels.empty()) {
      out << "  refinement ladder:\n";
      for (const Level& lv : levels)
        out << "    " << lv.nodes << " nodes: dual " << sci(lv.dual)
            << "  ratio " << std::setprecision(3) << lv.ratio << "  weak "
            << sci(lv.weak) << "  grad " << sci(lv.grad) << "\n";
      out << "  residual order    ratios within [" << std::setprecision(3)
          << ratio_lo << ", " << ratio_hi << "]  " << pf(order_ok) << "\n";
    }
    out << "  weak-form defect  " << sci(finest_weak) << "  (max "
        << sci(vc.weak_defect_max, 0) << ")  " << pf(weak_ok) << "\n";
    out << "result: " << pf(passed) << "\n";

    Json payload = residual_json(base);
    payload["base"] = {{"nodes", static_cast<int>(mesh->size())},
                       {"grad_norm", grad},
                       {"I", energy},
                       {"min_nodal", minn}};
    Json lj = Json::array();
    for (const Level& lv : levels)
      lj.push_back({{"nodes", lv.nodes},
                    {"dual_max_rel", lv.dual},
                    {"weak_defect", lv.weak},
                    {"grad_norm", lv.grad},
                    {"ratio_from_previous", lv.ratio}});
    payload["refinement"] = lj;
    payload["checks"] = {{"gradient", grad_ok},     {"positive_energy", energy_ok},
                         {"nonnegative", nodal_ok}, {"residual_order", order_ok},
                         {"weak_form", weak_ok},    {"decay", decay_ok}};
    payload["passed"] = passed;
    if (!ensure_dir(cfg.output, err)) return 1;
    if (!write_file(dir / "residual_report.json",
                    json_text(report_envelope("verify", cfg, payload)), err))
      return 1;
    return passed ? 0 : 2;
  } catch (const SolverDivergence& d) {
    err << "error: mesh transfer failed: " << d.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int run_rates(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (!require_check_inputs(cfg, err)) return 1;
  MeshPtr mesh;
  try {
    mesh = std::make_shared<const RadialMesh>(cfg.dimension, cfg.mesh.r_min,
                                              cfg.mesh.r_max, cfg.mesh.nodes);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  // fit against the most permissive declared envelope for each end
  std::size_t i0 = 0, iI = 0;
  q1_range(cfg.env_zero, cfg.dimension, &i0);
  q2_lower_bound(cfg.env_infinity, cfg.dimension, &iI);
  const DualTransform ft;
  try {
    const RateFit zero =
        embedding_rate_fit(cfg.g.q1, cfg.env_zero[i0], RateSide::zero, mesh,
                           cfg.V, cfg.K, ft, cfg.rates.samples,
                           cfg.rates.seed);
    const RateFit inf =
        embedding_rate_fit(cfg.g.q2, cfg.env_infinity[iI], RateSide::infinity,
                           mesh, cfg.V, cfg.K, ft, cfg.rates.samples,
                           cfg.rates.seed);

    out << "rates: q1 = " << to_string(cfg.g.q1) << " at zero, q2 = "
        << to_string(cfg.g.q2) << " at infinity (" << cfg.rates.samples
        << " samples)\n";
    out << "  zero:     delta_hat = " << fixed6(zero.delta_hat)
        << ", predicted = " << to_string(zero.delta_predicted) << "\n";
    out << "  infinity: delta_hat = " << fixed6(inf.delta_hat)
        << ", predicted = " << to_string(inf.delta_predicted) << "\n";

    if (!ensure_dir(cfg.output, err)) return 1;
    const fs::path dir(cfg.output);
    auto ladder_csv = [](const RateFit& f) {
      std::ostringstream s;
      s << "R,S_estimate\n";
      s.precision(17);
      for (std::size_t i = 0; i < f.radii.size(); ++i)
        s << f.radii[i] << "," << f.s_estimate[i] << "\n";
      return s.str();
    };
    bool ok = write_file(dir / "rate_zero.csv", ladder_csv(zero), err);
    ok = write_file(dir / "rate_infinity.csv", ladder_csv(inf), err) && ok;
    Json payload;
    payload["zero"] = rate_fit_json(zero);
    payload["infinity"] = rate_fit_json(inf);
    ok = write_file(dir / "rates_report.json",
                    json_text(report_envelope("rates", cfg, payload)), err) &&
         ok;
    return ok ? 0 : 1;
  } catch (const std::domain_error& e) {
    out << "rates: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int run_command(const std::string& command, const std::string& config_path,
                const CliOverrides& ov, std::ostream& out, std::ostream& err) {
  std::ifstream f(config_path);
  if (!f) {
    err << "error: cannot open config '" << config_path << "'\n";
    return 1;
  }
  std::ostringstream buf;
  buf << f.rdbuf();

  RunConfig cfg;
  try {
    cfg = parse_config(buf.str());
  } catch (const ConfigError& e) {
    if (e.line > 0)
      err << config_path << ":" << e.line << ":" << e.col << ": error: "
          << e.what() << "\n";
    else
      err << config_path << ": error: " << e.what() << "\n";
    return 1;
  }
  if (!ov.out_dir.empty()) cfg.output = ov.out_dir;
  if (ov.seed) {
    cfg.solver.seed = *ov.seed;
    cfg.rates.seed = *ov.seed;
  }
  if (ov.threads > 0) cfg.threads = ov.threads;
  cfg.force = ov.force;

  if (command == "check") return run_check(cfg, out, err);
  if (command == "solve") return run_solve(cfg, out, err);
  if (command == "verify") return run_verify(cfg, out, err);
  if (command == "rates") return run_rates(cfg, out, err);
  err << "error: unknown command '" << command << "'\n";
  return 1;
}

}  // namespace qlgs
