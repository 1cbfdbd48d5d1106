#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "descon/common.hpp"
#include "descon/objective.hpp"
#include "descon/topology.hpp"

namespace descon::cfg {

struct TopologyConfig {
  std::string kind = "random";  // path | star | complete | cycle | random
  int n = 0;
  double p_c = 0.4;
  std::uint64_t seed = 0;
  std::string file;          // serialized edge list; overrides kind/n/p_c/seed
  std::string weights_file;  // custom symmetric weight matrix; default Metropolis
};

struct ObjectiveConfig {
  std::string kind = "quadratic";  // quadratic | logistic | dataset
  int p = 1;
  double cond = 10.0;  // quadratic condition number cap
  std::uint64_t seed = 0;
  int q = 5;             // logistic samples per node
  double reg = 1e-3;
  double scale = 1.0;    // logistic feature scale
  double flip_prob = 0.0;
  std::string file;            // dataset CSV, split contiguously across nodes
  bool unregularized_ok = false;  // must be set to accept logistic reg = 0
  // Explicit quadratic targets (n*p comma-separated values). When present the
  // per-node objectives are 1/2 ||x - target_i||^2, which makes analytic
  // fixtures expressible in a config.
  std::vector<double> targets;
};

struct SolverConfig {
  std::string name;          // section label, defaults to kind
  std::string kind = "nn";   // dgd | nn | ann | dadmm | dlm | dqm
  int K = 1;
  double eps = 1.0;
  double alpha0 = 1e-2;
  double tol = -1.0;  // adaptive signal threshold; < 0 means 1e-3 ||g_0||
  double alpha_divisor = 10.0;
  double alpha_floor = 1e-8;
  double c = 1.0;
  double rho_lin = 1.0;
  double inner_tol = 1e-12;

  bool gradient_family() const { return kind == "dgd" || kind == "nn" || kind == "ann"; }
};

struct RunConfig {
  int max_iters = 100;
  std::optional<double> grad_tol;
  std::optional<double> rel_err_tol;
  std::string x0 = "zeros";  // zeros | random
  std::uint64_t x0_seed = 0;
};

struct DiagnosticsConfig {
  int certify_every = 0;  // 0 disables interleaved bound certification
  bool rate_checks = false;
  bool energy_checks = false;
  double mu = 2.0;
  double mu_prime = 2.0;
};

struct ExperimentConfig {
  TopologyConfig topology;
  ObjectiveConfig objective;
  std::vector<SolverConfig> solvers;
  RunConfig run;
  DiagnosticsConfig diagnostics;
};

// Strict sectioned key = value text. Unknown sections, unknown keys,
// duplicate solver labels, and malformed values all throw Error.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// --seed N: replaces topology.seed, objective.seed and run.x0_seed with
// N, N + 1, N + 2 so one flag reseeds the whole experiment.
void apply_seed_override(ExperimentConfig& cfg, std::uint64_t seed);

// Materialized experiment shared by every subcommand.
struct Experiment {
  Topology top;
  WeightMatrix weights;
  std::vector<LocalObjective> locals;
  int p = 1;
  Vec x0;
};

Experiment build_experiment(const ExperimentConfig& cfg);

// Whitespace-separated square matrix: first line n, then n rows of n values.
Mat load_matrix(const std::string& path);

}  // namespace descon::cfg
