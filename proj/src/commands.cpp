#include "descon/commands.hpp"

#include <cmath>
#include <filesystem>
#include <iostream>
#include <memory>
#include <sstream>

#include "descon/config.hpp"
#include "descon/report.hpp"
#include "descon/simharness.hpp"
#include "descon/spectral.hpp"

namespace descon::cli {

namespace {

using report::json;

int fail_config(const std::string& msg) {
  std::cerr << "error: " << msg << "\n";
  return 1;
}

int fail_certification(const std::string& msg) {
  std::cerr << "certification failed: " << msg << "\n";
  return 2;
}

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

Vec stack_consensus(const Vec& x_tilde, int n) {
  Vec out(n * x_tilde.size());
  for (int i = 0; i < n; ++i) out.segment(i * x_tilde.size(), x_tilde.size()) = x_tilde;
  return out;
}

admm::Config admm_config(const cfg::SolverConfig& s) {
  admm::Config a;
  a.variant = s.kind == "dadmm"  ? admm::Variant::kDadmm
              : s.kind == "dlm" ? admm::Variant::kDlm
                                : admm::Variant::kDqm;
  a.c = s.c;
  a.rho_lin = s.rho_lin;
  a.inner_tol = s.inner_tol;
  return a;
}

nn::Config nn_config(const cfg::SolverConfig& s) {
  nn::Config c;
  c.K = s.K;
  c.eps = s.eps;
  c.adaptive = s.kind == "ann";
  c.tol = s.tol;
  c.alpha_divisor = s.alpha_divisor;
  c.alpha_floor = s.alpha_floor;
  return c;
}

struct BuiltSolver {
  std::unique_ptr<sim::Solver> solver;
  sim::RunReference ref;
};

// Every solver reports rel_err against the stacked consensus optimum so the
// families are directly comparable; the objective-gap reference is the
// penalty optimum for the penalty family (undefined under an adaptive
// schedule) and the aggregate local optimum for the multiplier family.
BuiltSolver build_solver(const cfg::Experiment& exp, const cfg::SolverConfig& s,
                         const Vec& x_tilde_star) {
  BuiltSolver b;
  b.ref.x_ref = stack_consensus(x_tilde_star, exp.top.n);
  if (s.gradient_family()) {
    PenaltyObjective P = make_penalty(exp.top, exp.weights, exp.locals, s.alpha0);
    if (s.kind == "dgd") {
      b.solver = sim::make_dgd(P, s.eps, exp.x0);
    } else {
      b.solver = sim::make_nn(P, nn_config(s), exp.x0);
    }
    if (s.kind != "ann") b.ref.F_star = centralized_reference(P).F_star;
  } else {
    const IncidenceSet inc = build_incidence(exp.top, exp.p);
    b.solver = sim::make_admm(exp.top, inc, exp.locals, admm_config(s), exp.x0);
    double f_star = 0.0;
    for (const auto& f : exp.locals) f_star += f.value(x_tilde_star);
    b.ref.F_star = f_star;
  }
  return b;
}

sim::StopRule stop_rule(const cfg::RunConfig& r) {
  sim::StopRule st;
  st.max_iters = r.max_iters;
  st.grad_tol = r.grad_tol;
  st.rel_err_tol = r.rel_err_tol;
  return st;
}

CurvatureConstants experiment_curvature(const cfg::Experiment& exp, const Vec& x_tilde_star) {
  try {
    return aggregate_curvature(exp.locals);
  } catch (const Error&) {
    return aggregate_curvature_estimated(exp.locals, x_tilde_star);
  }
}

int first_iteration_below(const std::vector<double>& rel_err, double thr) {
  for (std::size_t t = 0; t < rel_err.size(); ++t)
    if (!std::isnan(rel_err[t]) && rel_err[t] <= thr) return static_cast<int>(t);
  return -1;
}

// Least-squares slope of log(gap) over the iterations before the floor;
// exp(slope) estimates the per-iteration linear factor.
double fitted_linear_rate(const std::vector<double>& gap) {
  if (gap.empty() || !(gap.front() > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  const double floor = std::max(1e-13 * gap.front(), 1e-300);
  std::vector<double> ys;
  for (double g : gap) {
    if (!(g > floor)) break;
    ys.push_back(std::log(g));
  }
  const int k = static_cast<int>(ys.size());
  if (k < 2) return std::numeric_limits<double>::quiet_NaN();
  double tbar = 0.0, ybar = 0.0;
  for (int t = 0; t < k; ++t) {
    tbar += t;
    ybar += ys[t];
  }
  tbar /= k;
  ybar /= k;
  double num = 0.0, den = 0.0;
  for (int t = 0; t < k; ++t) {
    num += (t - tbar) * (ys[t] - ybar);
    den += (t - tbar) * (t - tbar);
  }
  return std::exp(num / den);
}

}  // namespace

int cmd_run(const std::string& config_path, const std::string& out_dir,
            std::optional<std::uint64_t> seed) {
  cfg::ExperimentConfig conf;
  cfg::Experiment exp;
  try {
    conf = cfg::load_config(config_path);
    if (seed) cfg::apply_seed_override(conf, *seed);
    require(conf.solvers.size() == 1, "run expects exactly one [solver] section");
    const auto& s = conf.solvers[0];
    if (conf.diagnostics.rate_checks)
      require(s.kind == "nn",
              "rate_checks requires the fixed-penalty second-order solver (kind = nn)");
    if (conf.diagnostics.energy_checks)
      require(!s.gradient_family(), "energy_checks requires a multiplier-family solver");
    if (conf.diagnostics.certify_every > 0)
      require(s.gradient_family(), "certify_every applies to penalty-family solvers");
    exp = cfg::build_experiment(conf);
  } catch (const Error& e) {
    return fail_config(e.what());
  }

  const auto& s = conf.solvers[0];
  const auto& d = conf.diagnostics;
  const bool diagnostics_on = d.certify_every > 0 || d.rate_checks || d.energy_checks;

  try {
    std::filesystem::create_directories(out_dir);

    const Vec x_tilde_star = consensus_minimizer(exp.locals);
    const CurvatureConstants cc = experiment_curvature(exp, x_tilde_star);

    // The weight-bound assumptions back every spectral claim; with
    // diagnostics on, a violation is a certification failure.
    const WeightBounds* wb_ptr = nullptr;
    WeightBounds wb;
    std::string wb_error;
    try {
      wb = check_weight_bounds(exp.top, exp.weights);
      wb_ptr = &wb;
    } catch (const Error& e) {
      wb_error = e.what();
    }
    if (diagnostics_on && !wb_error.empty()) return fail_certification(wb_error);

    BuiltSolver built = build_solver(exp, s, x_tilde_star);

    sim::MessageLedger ledger;
    sim::RoundEngine eng(exp.top, &ledger);

    json certification = json::array();
    bool certification_failed = false;
    std::string first_failure;
    sim::IterCallback on_iter;
    if (d.certify_every > 0) {
      on_iter = [&](int t, const sim::Solver& sol) {
        if (t % d.certify_every != 0) return;
        PenaltyObjective P_now =
            make_penalty(exp.top, exp.weights, exp.locals, sol.alpha());
        const auto rep = spectral::certify_splitting(P_now, sol.stacked(), s.K);
        certification.push_back(report::splitting_json(rep, t));
        if (!rep.pass && !certification_failed) {
          certification_failed = true;
          for (const auto& b : rep.bounds)
            if (!b.pass) {
              first_failure = "bound '" + b.name + "' violated at iteration " +
                              std::to_string(t);
              break;
            }
        }
      };
    }

    const ConvergenceTrace trace =
        sim::run(*built.solver, eng, stop_rule(conf.run), &built.ref, on_iter);
    report::write_file(join(out_dir, "trace.csv"), trace.to_csv());

    json rep;
    rep["schema"] = "descon-report-v1";
    rep["command"] = "run";
    rep["topology"] = report::topology_json(conf.topology, exp.top, wb_ptr);
    rep["objective"] = report::objective_json(conf.objective, cc);
    rep["solver"] = report::solver_json(s);
    rep["run"] = report::trace_summary_json(trace);
    json notes = json::array();
    notes.push_back(
        "signal broadcasts are delivered at the same synchronous barrier in which "
        "they are sent, so a completed board divides alpha within the iteration");
    notes.push_back(
        "after an alpha division every node refreshes its gradient and diagonal "
        "block from state already in hand; no extra exchange is charged");
    rep["notes"] = notes;
    if (d.certify_every > 0) rep["certification"] = certification;

    int exit_code = certification_failed ? 2 : 0;
    if (certification_failed) std::cerr << "certification failed: " << first_failure << "\n";

    if (d.rate_checks) {
      const auto env =
          spectral::series_envelope(s.alpha0, cc.m, cc.M, wb.delta, wb.Delta, s.K);
      const double F0_gap = trace.records.front().F_gap;
      const auto rc = spectral::rate_constants(s.alpha0, cc, wb.delta, wb.Delta, env.lambda,
                                               env.Lambda, s.eps, F0_gap);
      const double guaranteed =
          nn::guaranteed_stepsize(cc.m, cc.L, env.lambda, env.Lambda, F0_gap);
      rep["rate"] = report::rate_json(rc, guaranteed, env.rho_pow);

      const bool certified_regime =
          !cc.approximate && s.eps <= guaranteed + 1e-15 && rc.stepsize_rule_satisfied;
      if (rc.stepsize_rule_satisfied) {
        const auto ec = spectral::check_linear_envelope(trace.gap_series(), rc.zeta);
        rep["envelope"] = report::envelope_json(ec);
        if (!ec.pass && certified_regime && exit_code == 0) {
          exit_code = 2;
          std::cerr << "certification failed: linear envelope violated at iteration "
                    << ec.worst_t << "\n";
        }
      }
      const auto rr =
          spectral::check_gradient_recursion(trace.wgn_prev_series(), rc, env.rho, s.K);
      rep["recursion"] = report::recursion_json(rr);
      if ((!rr.all_recursion_ok || !rr.all_quad_ok) && certified_regime && exit_code == 0) {
        exit_code = 2;
        std::cerr << "certification failed: weighted-gradient recursion violated\n";
      }
    }

    if (d.energy_checks) {
      // Replay the run through the direct update path (bit-identical to the
      // simulated one) to audit the energy contraction step by step.
      const IncidenceSet inc = build_incidence(exp.top, exp.p);
      const admm::Config acfg = admm_config(s);
      const admm::Reference aref = admm::admm_reference(exp.top, inc, exp.locals);
      admm::EnergyParams ep;
      ep.mu = d.mu;
      ep.mu_prime = d.mu_prime;
      admm::State state = admm::make_state(inc, exp.x0);
      std::vector<admm::EnergyStep> steps;
      steps.reserve(trace.iterations());
      for (int t = 0; t < trace.iterations(); ++t) {
        const admm::State before = state;
        admm::step(state, exp.top, inc, exp.locals, acfg);
        steps.push_back(
            admm::evaluate_energy_step(before, state, aref, inc, cc, acfg, ep));
      }
      rep["energy"] = report::energy_json(steps);
      bool all_ok = true;
      for (const auto& es : steps) all_ok = all_ok && es.contraction_ok && es.recovery_ok;
      if (!all_ok && !cc.approximate && exit_code == 0) {
        exit_code = 2;
        std::cerr << "certification failed: energy contraction violated\n";
      }
    }

    report::write_file(join(out_dir, "report.json"), report::dump_report(rep));
    return exit_code;
  } catch (const Error& e) {
    return fail_config(e.what());
  }
}

int cmd_compare(const std::string& config_path, const std::string& out_dir,
                std::optional<std::uint64_t> seed) {
  cfg::ExperimentConfig conf;
  cfg::Experiment exp;
  try {
    conf = cfg::load_config(config_path);
    if (seed) cfg::apply_seed_override(conf, *seed);
    require(conf.solvers.size() >= 2, "compare expects at least two [solver] sections");
    exp = cfg::build_experiment(conf);
  } catch (const Error& e) {
    return fail_config(e.what());
  }

  try {
    std::filesystem::create_directories(out_dir);
    const Vec x_tilde_star = consensus_minimizer(exp.locals);

    std::vector<std::string> names;
    std::vector<std::vector<double>> columns;
    std::size_t longest = 0;
    for (const auto& s : conf.solvers) {
      BuiltSolver built = build_solver(exp, s, x_tilde_star);
      sim::MessageLedger ledger;
      sim::RoundEngine eng(exp.top, &ledger);
      const ConvergenceTrace trace = sim::run(*built.solver, eng, stop_rule(conf.run), &built.ref);
      names.push_back(s.name);
      columns.push_back(trace.rel_err_series());
      longest = std::max(longest, columns.back().size());
    }

    std::ostringstream csv;
    csv << "t";
    for (const auto& name : names) csv << ",rel_err_" << name;
    csv << "\n";
    for (std::size_t t = 0; t < longest; ++t) {
      csv << t;
      for (const auto& col : columns)
        csv << "," << format_double(t < col.size() ? col[t] : std::numeric_limits<double>::quiet_NaN());
      csv << "\n";
    }
    const std::pair<const char*, double> thresholds[] = {{"1e-3", 1e-3}, {"1e-9", 1e-9}};
    for (const auto& [label, thr] : thresholds) {
      for (std::size_t i = 0; i < names.size(); ++i) {
        const int it = first_iteration_below(columns[i], thr);
        csv << "# iterations_to_" << label << "," << names[i] << ","
            << (it < 0 ? std::string("never") : std::to_string(it)) << "\n";
      }
    }
    report::write_file(join(out_dir, "comparison.csv"), csv.str());
    return 0;
  } catch (const Error& e) {
    return fail_config(e.what());
  }
}

int cmd_sweep_alpha(const std::string& config_path, const std::string& out_dir,
                    std::optional<std::uint64_t> seed, const std::vector<double>& alphas) {
  cfg::ExperimentConfig conf;
  cfg::Experiment exp;
  try {
    require(!alphas.empty(), "alpha grid must not be empty");
    for (double a : alphas) require(a > 0.0, "alpha grid values must be positive");
    conf = cfg::load_config(config_path);
    if (seed) cfg::apply_seed_override(conf, *seed);
    require(conf.solvers.size() == 1, "sweep-alpha expects exactly one [solver] section");
    require(conf.solvers[0].gradient_family(),
            "sweep-alpha requires a penalty-family solver (dgd, nn or ann)");
    exp = cfg::build_experiment(conf);
  } catch (const Error& e) {
    return fail_config(e.what());
  }

  try {
    std::filesystem::create_directories(out_dir);
    const auto study = spectral::alpha_gap_study(exp.top, exp.weights, exp.locals, alphas);
    const Vec x_tilde_star = consensus_minimizer(exp.locals);
    const CurvatureConstants cc = experiment_curvature(exp, x_tilde_star);
    const WeightBounds wb = check_weight_bounds(exp.top, exp.weights);

    std::ostringstream csv;
    csv << "alpha,gap,ratio,fitted_rate,zeta\n";
    for (const auto& row : study.rows) {
      cfg::SolverConfig s = conf.solvers[0];
      s.alpha0 = row.alpha;
      BuiltSolver built = build_solver(exp, s, x_tilde_star);
      sim::MessageLedger ledger;
      sim::RoundEngine eng(exp.top, &ledger);
      const ConvergenceTrace trace = sim::run(*built.solver, eng, stop_rule(conf.run), &built.ref);
      const double rate = fitted_linear_rate(trace.gap_series());

      const auto env = spectral::series_envelope(row.alpha, cc.m, cc.M, wb.delta, wb.Delta, s.K);
      const double F0_gap = trace.records.front().F_gap;
      const auto rc = spectral::rate_constants(row.alpha, cc, wb.delta, wb.Delta, env.lambda,
                                               env.Lambda, s.eps, F0_gap);

      csv << format_double(row.alpha) << "," << format_double(row.gap) << ","
          << format_double(row.ratio) << "," << format_double(rate) << ","
          << format_double(rc.zeta) << "\n";
    }
    report::write_file(join(out_dir, "sweep.csv"), csv.str());
    return 0;
  } catch (const Error& e) {
    return fail_config(e.what());
  }
}

int cmd_certify(const std::string& config_path, const std::string& out_dir,
                std::optional<std::uint64_t> seed) {
  cfg::ExperimentConfig conf;
  cfg::Experiment exp;
  try {
    conf = cfg::load_config(config_path);
    if (seed) cfg::apply_seed_override(conf, *seed);
    require(conf.solvers.size() == 1, "certify expects exactly one [solver] section");
    require(conf.solvers[0].gradient_family(),
            "certify requires a penalty-family solver (dgd, nn or ann)");
    exp = cfg::build_experiment(conf);
    require(static_cast<long long>(exp.top.n) * exp.p <= 500,
            "certify: problem dimension np > 500; certify a sampled sub-instance instead");
  } catch (const Error& e) {
    return fail_config(e.what());
  }

  try {
    std::filesystem::create_directories(out_dir);
    try {
      check_weight_bounds(exp.top, exp.weights);
    } catch (const Error& e) {
      return fail_certification(e.what());
    }

    const auto& s = conf.solvers[0];
    PenaltyObjective P = make_penalty(exp.top, exp.weights, exp.locals, s.alpha0);
    const auto rep = spectral::certify_splitting(P, exp.x0, s.K);

    for (const auto& b : rep.bounds) {
      std::cout << b.name << ": " << (b.pass ? "pass" : "FAIL") << "  bounds [" << b.lo
                << ", " << b.hi << "]  measured [" << b.measured_min << ", "
                << b.measured_max << "]\n";
    }

    json out;
    out["schema"] = "descon-report-v1";
    out["command"] = "certify";
    const WeightBounds wb = check_weight_bounds(exp.top, exp.weights);
    out["topology"] = report::topology_json(conf.topology, exp.top, &wb);
    const Vec x_tilde_star = consensus_minimizer(exp.locals);
    out["objective"] =
        report::objective_json(conf.objective, experiment_curvature(exp, x_tilde_star));
    out["solver"] = report::solver_json(s);
    json cert = json::array();
    cert.push_back(report::splitting_json(rep, 0));
    out["certification"] = cert;
    report::write_file(join(out_dir, "report.json"), report::dump_report(out));

    if (!rep.pass) {
      for (const auto& b : rep.bounds)
        if (!b.pass) return fail_certification("bound '" + b.name + "' violated");
    }
    return 0;
  } catch (const Error& e) {
    return fail_config(e.what());
  }
}

}  // namespace descon::cli
