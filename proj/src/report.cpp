#include "descon/report.hpp"

#include <cmath>
#include <fstream>

namespace descon::report {

json number_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

json topology_json(const cfg::TopologyConfig& tc, const Topology& top,
                   const WeightBounds* wb) {
  json j;
  j["kind"] = tc.file.empty() ? tc.kind : "file";
  j["n"] = top.n;
  j["num_edges"] = top.num_directed_edges() / 2;
  j["seed"] = tc.seed;
  j["weights"] = tc.weights_file.empty() ? "metropolis" : "custom";
  if (wb) {
    j["delta"] = wb->delta;
    j["Delta"] = wb->Delta;
    j["rho_w"] = wb->rho_w;
  }
  return j;
}

json objective_json(const cfg::ObjectiveConfig& oc, const CurvatureConstants& cc) {
  json j;
  j["kind"] = oc.kind;
  j["p"] = oc.p;
  j["m"] = cc.m;
  j["M"] = cc.M;
  j["L"] = cc.L;
  j["curvature_approximate"] = cc.approximate;
  if (oc.kind == "quadratic") {
    j["cond"] = oc.cond;
    j["seed"] = oc.seed;
  } else if (oc.kind == "logistic") {
    j["q"] = oc.q;
    j["reg"] = oc.reg;
    j["scale"] = oc.scale;
    j["flip_prob"] = oc.flip_prob;
    j["seed"] = oc.seed;
  } else {
    j["file"] = oc.file;
    j["reg"] = oc.reg;
  }
  return j;
}

json solver_json(const cfg::SolverConfig& sc) {
  json j;
  j["name"] = sc.name;
  j["kind"] = sc.kind;
  if (sc.gradient_family()) {
    j["K"] = sc.K;
    j["eps"] = sc.eps;
    j["alpha0"] = sc.alpha0;
    if (sc.kind == "ann") {
      j["tol"] = sc.tol;
      j["alpha_divisor"] = sc.alpha_divisor;
      j["alpha_floor"] = sc.alpha_floor;
    }
  } else {
    j["c"] = sc.c;
    if (sc.kind == "dlm") j["rho_lin"] = sc.rho_lin;
    if (sc.kind == "dadmm") j["inner_tol"] = sc.inner_tol;
  }
  return j;
}

json trace_summary_json(const ConvergenceTrace& trace) {
  json j;
  const auto& last = trace.records.back();
  j["iterations"] = trace.iterations();
  j["final_F"] = number_or_null(last.F);
  j["final_F_gap"] = number_or_null(last.F_gap);
  j["final_grad_norm"] = number_or_null(last.grad_norm);
  j["final_rel_err"] = number_or_null(last.rel_err);
  j["final_alpha"] = number_or_null(last.alpha);
  j["messages_total"] = last.msgs_cum;
  json wgn = json::array();
  for (const auto& r : trace.records) wgn.push_back(number_or_null(r.wgn_curr));
  j["weighted_grad_norm_curr_D"] = wgn;
  return j;
}

json splitting_json(const spectral::SplittingReport& rep, int t) {
  json j;
  j["t"] = t;
  j["K"] = rep.K;
  j["alpha"] = rep.alpha;
  j["m"] = rep.m;
  j["M"] = rep.M;
  j["delta"] = rep.delta;
  j["Delta"] = rep.Delta;
  j["rho"] = rep.rho;
  j["rho_alt"] = rep.rho_alt;
  j["rho_pow"] = rep.rho_pow;
  j["lambda"] = rep.lambda;
  j["Lambda"] = rep.Lambda;
  j["pass"] = rep.pass;
  json bounds = json::array();
  for (const auto& b : rep.bounds) {
    json bj;
    bj["name"] = b.name;
    bj["lo"] = b.lo;
    bj["hi"] = b.hi;
    bj["measured_min"] = b.measured_min;
    bj["measured_max"] = b.measured_max;
    bj["slack"] = b.slack;
    bj["pass"] = b.pass;
    bounds.push_back(bj);
  }
  j["bounds"] = bounds;
  return j;
}

json rate_json(const spectral::RateConstants& rc, double guaranteed_eps, double rho_pow) {
  json j;
  j["eps"] = rc.eps;
  j["guaranteed_eps"] = guaranteed_eps;
  j["zeta"] = rc.zeta;
  j["gamma1"] = rc.gamma1;
  j["gamma2"] = rc.gamma2;
  j["rho_pow"] = rho_pow;
  j["stepsize_rule_satisfied"] = rc.stepsize_rule_satisfied;
  return j;
}

json envelope_json(const spectral::EnvelopeCheck& ec) {
  json j;
  j["pass"] = ec.pass;
  j["worst_t"] = ec.worst_t;
  j["worst_ratio"] = number_or_null(ec.worst_ratio);
  return j;
}

json recursion_json(const spectral::RecursionReport& rr) {
  json j;
  j["t0"] = rr.t0;
  j["all_recursion_ok"] = rr.all_recursion_ok;
  j["all_quad_ok"] = rr.all_quad_ok;
  j["num_flagged"] = rr.num_flagged;
  j["quadratic_phase_vacuous"] = rr.quadratic_phase_vacuous;
  j["note"] = rr.note;
  json rows = json::array();
  for (const auto& r : rr.rows) {
    json rj;
    rj["t"] = r.t;
    rj["eta"] = number_or_null(r.eta);
    rj["v"] = number_or_null(r.v);
    rj["v_next"] = number_or_null(r.v_next);
    rj["rhs"] = number_or_null(r.rhs);
    rj["recursion_ok"] = r.recursion_ok;
    rj["flagged"] = r.flagged;
    rj["quad_ok"] = r.quad_ok;
    rows.push_back(rj);
  }
  j["rows"] = rows;
  return j;
}

json energy_json(const std::vector<admm::EnergyStep>& steps) {
  json j;
  bool all_contract = true, all_recovery = true;
  json rows = json::array();
  int k = 0;
  for (const auto& s : steps) {
    json rj;
    rj["k"] = k++;
    rj["V_before"] = s.V_before;
    rj["V_after"] = s.V_after;
    rj["zeta_k"] = s.zeta_k;
    rj["eta_used"] = s.eta_used;
    rj["delta_k"] = s.delta_k;
    rj["limit_delta"] = s.limit_delta;
    rj["recovery_bound"] = s.recovery_bound;
    rj["contraction_ok"] = s.contraction_ok;
    rj["recovery_ok"] = s.recovery_ok;
    rows.push_back(rj);
    all_contract = all_contract && s.contraction_ok;
    all_recovery = all_recovery && s.recovery_ok;
  }
  j["all_contraction_ok"] = all_contract;
  j["all_recovery_ok"] = all_recovery;
  j["steps"] = rows;
  return j;
}

std::string dump_report(const json& j) {
  return j.dump(2) + "\n";
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "cannot open output file: " + path);
  out << contents;
  require(out.good(), "failed writing output file: " + path);
}

}  // namespace descon::report
