#include <qlgs/reports.hpp>

#include <ctime>

namespace qlgs {
namespace {

Json envelope_json(const Envelope& e) {
  Json j;
  j["alpha"] = e.alpha_any ? "any" : to_string(e.alpha);
  j["beta"] = to_string(e.beta);
  j["radius"] = e.radius;
  j["alpha_any"] = e.alpha_any;
  return j;
}

Json interval_json(const OpenInterval& iv) {
  Json j;
  j["empty"] = iv.empty;
  if (!iv.empty) {
    j["lo"] = to_string(iv.lo);
    j["hi"] = iv.unbounded_above ? "inf" : to_string(iv.hi);
  }
  j["text"] = to_string(iv);
  return j;
}

const char* kind_name(NonlinearitySpec::Kind k) {
  switch (k) {
    case NonlinearitySpec::Kind::min_power: return "min_power";
    case NonlinearitySpec::Kind::ratio_power: return "ratio_power";
    case NonlinearitySpec::Kind::single_power: return "single_power";
    case NonlinearitySpec::Kind::zero: return "zero";
  }
  return "?";
}

}  // namespace

Json config_json(const RunConfig& cfg) {
  Json j;
  j["dimension"] = cfg.dimension;
  j["V"] = cfg.V.text();
  j["K"] = cfg.K.text();
  Json nl;
  nl["kind"] = kind_name(cfg.g.kind);
  if (!cfg.g.is_zero()) {
    nl["q1"] = to_string(cfg.g.q1);
    nl["q2"] = to_string(cfg.g.q2);
    nl["theta"] = to_string(cfg.g.theta);
    nl["truncated_negative"] = cfg.g.truncated_negative;
  }
  j["nonlinearity"] = nl;
  Json ez = Json::array(), ei = Json::array();
  for (const Envelope& e : cfg.env_zero) ez.push_back(envelope_json(e));
  for (const Envelope& e : cfg.env_infinity) ei.push_back(envelope_json(e));
  j["envelope"]["zero"] = ez;
  j["envelope"]["infinity"] = ei;
  j["mesh"] = {{"nodes", cfg.mesh.nodes},
               {"r_min", cfg.mesh.r_min},
               {"r_max", cfg.mesh.r_max}};
  j["solver"] = {{"rho", cfg.solver.rho},
                 {"path_points", cfg.solver.path_points},
                 {"rho_samples", cfg.solver.rho_samples},
                 {"deform_tol", cfg.solver.deform_tol},
                 {"max_deform_iter", cfg.solver.max_deform_iter},
                 {"refine_tol", cfg.solver.refine_tol},
                 {"seed", cfg.solver.seed},
                 {"u0_inner", cfg.solver.u0_inner},
                 {"u0_outer", cfg.solver.u0_outer},
                 {"u0_height", cfg.solver.u0_height}};
  j["verify"] = {{"grad_norm_max", cfg.verify.grad_norm_max},
                 {"weak_defect_max", cfg.verify.weak_defect_max},
                 {"min_nodal", cfg.verify.min_nodal},
                 {"order_min", cfg.verify.order_min},
                 {"order_max", cfg.verify.order_max},
                 {"refine_levels", cfg.verify.refine_levels},
                 {"decay_margin", cfg.verify.decay_margin}};
  j["rates"] = {{"samples", cfg.rates.samples}, {"seed", cfg.rates.seed}};
  j["output"] = cfg.output;
  j["threads"] = cfg.threads;
  j["force"] = cfg.force;
  return j;
}

Json admissibility_json(const AdmissibilityReport& rep) {
  Json j;
  j["N"] = rep.N;
  j["q1"] = to_string(rep.q1);
  j["q2"] = to_string(rep.q2);
  j["theta"] = to_string(rep.theta);
  j["swapped"] = rep.swapped;
  j["single_power"] = rep.single_power;
  j["alpha_star_0"] = to_string(rep.alpha_star_0);
  j["q0_star"] = rep.q0_star_infinite ? "inf" : to_string(rep.q0_star);
  j["q_inf_star"] = to_string(rep.q_inf_star);
  j["q1_interval"] = interval_json(rep.q1_interval);
  j["q2_lower"] = to_string(rep.q2_lower);
  j["q1_existence"] = interval_json(rep.q1_existence);
  j["q_single"] = interval_json(rep.q_single);
  j["delta_zero"] =
      rep.delta_zero ? Json(to_string(*rep.delta_zero)) : Json(nullptr);
  j["delta_infinity"] =
      rep.delta_infinity ? Json(to_string(*rep.delta_infinity)) : Json(nullptr);
  j["existence_ok"] = rep.existence_ok;
  j["reasons"] = rep.reasons;
  j["message"] = rep.message;
  return j;
}

Json solve_json(const SolveReport& rep) {
  Json j;
  j["converged"] = rep.converged;
  j["I"] = rep.I;
  j["J"] = rep.J;
  j["grad_norm"] = rep.grad_norm;
  j["lambda"] = rep.lambda;
  j["certificate"] = {{"rho", rep.certificate.rho},
                      {"alpha_hat", rep.certificate.alpha_hat},
                      {"samples", rep.certificate.samples},
                      {"skipped", rep.certificate.skipped},
                      {"empirical", rep.certificate.empirical},
                      {"bound_shape", rep.certificate.bound_shape}};
  j["initial_path_max_energy"] = rep.initial_path_max_energy;
  j["min_nodal"] = rep.min_nodal;
  j["deform_iterations"] = rep.deform_iterations;
  j["refine_iterations"] = rep.refine_iterations;
  j["negative_flagged"] = rep.negative_flagged;
  j["outside_hypotheses"] = rep.outside_hypotheses;
  j["residual_summary"] = rep.residual_summary;
  return j;
}

Json rate_fit_json(const RateFit& fit) {
  Json j;
  j["delta_hat"] = fit.delta_hat;
  j["delta_predicted"] = to_string(fit.delta_predicted);
  j["radii"] = fit.radii;
  j["s_estimate"] = fit.s_estimate;
  return j;
}

Json residual_json(const ResidualReport& rep) {
  Json j;
  j["dual_ode"] = {{"max_rel", rep.dual_ode.max_rel},
                   {"max_raw", rep.dual_ode.max_raw}};
  j["original"] = {{"max_rel", rep.original.max_rel},
                   {"max_raw", rep.original.max_raw}};
  j["identity_max_rel"] = rep.identity_max_rel;
  j["weak_form_max_defect"] = rep.weak_form_max_defect;
  j["decay_ratio"] = rep.decay_ratio;
  j["decay_library_max"] = rep.decay_library_max;
  j["rate_zero"] =
      rep.rate_zero ? rate_fit_json(*rep.rate_zero) : Json(nullptr);
  j["rate_infinity"] =
      rep.rate_infinity ? rate_fit_json(*rep.rate_infinity) : Json(nullptr);
  return j;
}

Json report_envelope(const std::string& kind, const RunConfig& cfg,
                     Json payload) {
  Json j;
  j["report"] = kind;
  std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  j["generated_at"] = buf;
  j["config"] = config_json(cfg);
  for (auto& [k, v] : payload.items()) j[k] = std::move(v);
  return j;
}

}  // namespace qlgs
