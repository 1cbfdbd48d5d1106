#include "descon/config.hpp"

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "descon/netnewton.hpp"
#include "descon/rng.hpp"

namespace descon::cfg {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double parse_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw Error("invalid numeric value for " + key + ": '" + v + "'");
  }
  require(pos == v.size(), "invalid numeric value for " + key + ": '" + v + "'");
  return out;
}

long long parse_int(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  long long out = 0;
  try {
    out = std::stoll(v, &pos);
  } catch (const std::exception&) {
    throw Error("invalid integer value for " + key + ": '" + v + "'");
  }
  require(pos == v.size(), "invalid integer value for " + key + ": '" + v + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw Error("invalid boolean value for " + key + ": '" + v + "'");
}

void validate(const ExperimentConfig& c) {
  const auto& t = c.topology;
  if (t.file.empty()) {
    static const std::set<std::string> kinds = {"path", "star", "complete", "cycle", "random"};
    require(kinds.count(t.kind) == 1, "unknown topology kind: " + t.kind);
    require(t.n >= 2, "topology.n must be at least 2");
    if (t.kind == "random")
      require(t.p_c > 0.0 && t.p_c <= 1.0, "topology.p_c must lie in (0,1]");
  }

  const auto& o = c.objective;
  {
    static const std::set<std::string> kinds = {"quadratic", "logistic", "dataset"};
    require(kinds.count(o.kind) == 1, "unknown objective kind: " + o.kind);
    require(o.p >= 1, "objective.p must be at least 1");
    if (o.kind == "quadratic") require(o.cond >= 1.0, "objective.cond must be at least 1");
    if (o.kind == "logistic" || o.kind == "dataset") {
      require(o.reg >= 0.0, "objective.reg must be nonnegative");
      if (o.reg == 0.0)
        require(o.unregularized_ok,
                "logistic objective with reg = 0 is not strongly convex; set "
                "unregularized_ok = true to accept estimated curvature");
    }
    if (o.kind == "logistic") {
      require(o.q >= 1, "objective.q must be at least 1");
      require(o.scale > 0.0, "objective.scale must be positive");
      require(o.flip_prob >= 0.0 && o.flip_prob < 1.0, "objective.flip_prob must lie in [0,1)");
    }
    if (o.kind == "dataset") require(!o.file.empty(), "objective.file is required for dataset");
  }

  require(!c.solvers.empty(), "config must define at least one [solver] section");
  std::set<std::string> names;
  for (const auto& s : c.solvers) {
    static const std::set<std::string> kinds = {"dgd", "nn", "ann", "dadmm", "dlm", "dqm"};
    require(kinds.count(s.kind) == 1, "unknown solver kind: " + s.kind);
    require(names.insert(s.name).second, "duplicate solver label: " + s.name);
    if (s.gradient_family()) {
      require(s.eps > 0.0 && s.eps <= 1.0, "eps must lie in (0,1]");
      require(s.K >= 0, "K must be nonnegative");
      require(s.alpha0 > 0.0, "alpha0 must be positive");
      require(s.alpha_divisor > 1.0, "alpha_divisor must exceed 1");
      require(s.alpha_floor > 0.0, "alpha_floor must be positive");
    } else {
      require(s.c > 0.0, "c must be positive");
      require(s.rho_lin > 0.0, "rho_lin must be positive");
      require(s.inner_tol > 0.0, "inner_tol must be positive");
    }
  }

  require(c.run.max_iters >= 1, "run.max_iters must be at least 1");
  if (c.run.grad_tol) require(*c.run.grad_tol >= 0.0, "run.grad_tol must be nonnegative");
  if (c.run.rel_err_tol)
    require(*c.run.rel_err_tol >= 0.0, "run.rel_err_tol must be nonnegative");
  require(c.run.x0 == "zeros" || c.run.x0 == "random",
          "run.x0 must be 'zeros' or 'random'");

  require(c.diagnostics.certify_every >= 0, "diagnostics.certify_every must be nonnegative");
  require(c.diagnostics.mu > 1.0, "diagnostics.mu must exceed 1");
  require(c.diagnostics.mu_prime > 1.0, "diagnostics.mu_prime must exceed 1");
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig c;
  c.solvers.clear();

  enum class Section { kNone, kTopology, kObjective, kSolver, kRun, kDiagnostics };
  Section sec = Section::kNone;
  SolverConfig* cur_solver = nullptr;
  bool saw_solver_section = false;

  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      require(line.back() == ']', "malformed section header at line " + std::to_string(lineno));
      const std::string head = trim(line.substr(1, line.size() - 2));
      if (head == "topology") {
        sec = Section::kTopology;
      } else if (head == "objective") {
        sec = Section::kObjective;
      } else if (head == "run") {
        sec = Section::kRun;
      } else if (head == "diagnostics") {
        sec = Section::kDiagnostics;
      } else if (head == "solver" || head.rfind("solver ", 0) == 0) {
        sec = Section::kSolver;
        saw_solver_section = true;
        c.solvers.emplace_back();
        cur_solver = &c.solvers.back();
        if (head.size() > 7) cur_solver->name = trim(head.substr(7));
      } else {
        throw Error("unknown config section: [" + head + "]");
      }
      continue;
    }

    const auto eq = line.find('=');
    require(eq != std::string::npos, "expected key = value at line " + std::to_string(lineno));
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    require(!key.empty(), "empty key at line " + std::to_string(lineno));
    require(!val.empty(), "empty value for " + key);

    switch (sec) {
      case Section::kNone:
        throw Error("key outside any section: " + key);
      case Section::kTopology: {
        auto& t = c.topology;
        if (key == "kind") t.kind = val;
        else if (key == "n") t.n = static_cast<int>(parse_int("topology.n", val));
        else if (key == "p_c") t.p_c = parse_double("topology.p_c", val);
        else if (key == "seed")
          t.seed = static_cast<std::uint64_t>(parse_int("topology.seed", val));
        else if (key == "file") t.file = val;
        else if (key == "weights_file") t.weights_file = val;
        else throw Error("unknown config key: topology." + key);
        break;
      }
      case Section::kObjective: {
        auto& o = c.objective;
        if (key == "kind") o.kind = val;
        else if (key == "p") o.p = static_cast<int>(parse_int("objective.p", val));
        else if (key == "cond") o.cond = parse_double("objective.cond", val);
        else if (key == "seed")
          o.seed = static_cast<std::uint64_t>(parse_int("objective.seed", val));
        else if (key == "q") o.q = static_cast<int>(parse_int("objective.q", val));
        else if (key == "reg") o.reg = parse_double("objective.reg", val);
        else if (key == "scale") o.scale = parse_double("objective.scale", val);
        else if (key == "flip_prob") o.flip_prob = parse_double("objective.flip_prob", val);
        else if (key == "file") o.file = val;
        else if (key == "unregularized_ok")
          o.unregularized_ok = parse_bool("objective.unregularized_ok", val);
        else if (key == "targets") {
          o.targets.clear();
          std::string cur;
          std::istringstream ts(val);
          while (std::getline(ts, cur, ','))
            o.targets.push_back(parse_double("objective.targets", trim(cur)));
        }
        else throw Error("unknown config key: objective." + key);
        break;
      }
      case Section::kSolver: {
        auto& s = *cur_solver;
        if (key == "kind") s.kind = val;
        else if (key == "K") s.K = static_cast<int>(parse_int("solver.K", val));
        else if (key == "eps") s.eps = parse_double("solver.eps", val);
        else if (key == "alpha0") s.alpha0 = parse_double("solver.alpha0", val);
        else if (key == "tol") s.tol = parse_double("solver.tol", val);
        else if (key == "alpha_divisor")
          s.alpha_divisor = parse_double("solver.alpha_divisor", val);
        else if (key == "alpha_floor") s.alpha_floor = parse_double("solver.alpha_floor", val);
        else if (key == "c") s.c = parse_double("solver.c", val);
        else if (key == "rho_lin") s.rho_lin = parse_double("solver.rho_lin", val);
        else if (key == "inner_tol") s.inner_tol = parse_double("solver.inner_tol", val);
        else throw Error("unknown config key: solver." + key);
        break;
      }
      case Section::kRun: {
        auto& r = c.run;
        if (key == "max_iters") r.max_iters = static_cast<int>(parse_int("run.max_iters", val));
        else if (key == "grad_tol") r.grad_tol = parse_double("run.grad_tol", val);
        else if (key == "rel_err_tol") r.rel_err_tol = parse_double("run.rel_err_tol", val);
        else if (key == "x0") r.x0 = val;
        else if (key == "x0_seed")
          r.x0_seed = static_cast<std::uint64_t>(parse_int("run.x0_seed", val));
        else throw Error("unknown config key: run." + key);
        break;
      }
      case Section::kDiagnostics: {
        auto& d = c.diagnostics;
        if (key == "certify_every")
          d.certify_every = static_cast<int>(parse_int("diagnostics.certify_every", val));
        else if (key == "rate_checks") d.rate_checks = parse_bool("diagnostics.rate_checks", val);
        else if (key == "energy_checks")
          d.energy_checks = parse_bool("diagnostics.energy_checks", val);
        else if (key == "mu") d.mu = parse_double("diagnostics.mu", val);
        else if (key == "mu_prime") d.mu_prime = parse_double("diagnostics.mu_prime", val);
        else throw Error("unknown config key: diagnostics." + key);
        break;
      }
    }
  }
  require(saw_solver_section, "config must define at least one [solver] section");
  for (auto& s : c.solvers)
    if (s.name.empty()) s.name = s.kind;

  validate(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

void apply_seed_override(ExperimentConfig& cfg, std::uint64_t seed) {
  cfg.topology.seed = seed;
  cfg.objective.seed = seed + 1;
  cfg.run.x0_seed = seed + 2;
}

Mat load_matrix(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open matrix file: " + path);
  int n = 0;
  require(static_cast<bool>(in >> n) && n >= 1, "matrix file must start with its dimension");
  Mat W(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      require(static_cast<bool>(in >> W(i, j)), "matrix file truncated");
  return W;
}

Experiment build_experiment(const ExperimentConfig& cfg) {
  Experiment e;
  const auto& t = cfg.topology;
  if (!t.file.empty()) {
    std::ifstream in(t.file);
    require(in.good(), "cannot open topology file: " + t.file);
    std::ostringstream buf;
    buf << in.rdbuf();
    e.top = deserialize_topology(buf.str());
  } else if (t.kind == "path") {
    e.top = make_path(t.n);
  } else if (t.kind == "star") {
    e.top = make_star(t.n);
  } else if (t.kind == "complete") {
    e.top = make_complete(t.n);
  } else if (t.kind == "cycle") {
    e.top = make_cycle(t.n);
  } else {
    e.top = make_random_connected(t.n, t.p_c, t.seed);
  }

  if (!t.weights_file.empty())
    e.weights = custom_weights(e.top, load_matrix(t.weights_file));
  else
    e.weights = metropolis_weights(e.top);

  const auto& o = cfg.objective;
  e.p = o.p;
  if (o.kind == "quadratic" && !o.targets.empty()) {
    require(static_cast<int>(o.targets.size()) == e.top.n * o.p,
            "objective.targets must list n * p values");
    for (int i = 0; i < e.top.n; ++i) {
      Vec target(o.p);
      for (int k = 0; k < o.p; ++k) target[k] = o.targets[i * o.p + k];
      e.locals.push_back(LocalObjective::quadratic_centered(Mat::Identity(o.p, o.p), target));
    }
  } else if (o.kind == "quadratic") {
    e.locals = synth_quadratics(e.top.n, o.p, o.cond, o.seed);
  } else if (o.kind == "logistic") {
    e.locals = synth_logistics(e.top.n, o.p, o.q, o.reg, o.scale, o.flip_prob, o.seed);
  } else {
    const Dataset data = load_dataset_csv(o.file);
    const int total = static_cast<int>(data.labels.size());
    require(total >= e.top.n, "dataset must provide at least one sample per node");
    require(data.samples.cols() == o.p, "dataset feature dimension does not match objective.p");
    e.locals.reserve(e.top.n);
    for (int i = 0; i < e.top.n; ++i) {
      const int lo = static_cast<int>(static_cast<long long>(total) * i / e.top.n);
      const int hi = static_cast<int>(static_cast<long long>(total) * (i + 1) / e.top.n);
      Mat chunk = data.samples.middleRows(lo, hi - lo);
      std::vector<int> labels(data.labels.begin() + lo, data.labels.begin() + hi);
      e.locals.push_back(LocalObjective::logistic(std::move(chunk), std::move(labels), o.reg));
    }
  }

  const int np = e.top.n * e.p;
  if (cfg.run.x0 == "zeros") {
    e.x0 = Vec::Zero(np);
  } else {
    Rng rng(cfg.run.x0_seed);
    e.x0.resize(np);
    for (int i = 0; i < np; ++i) e.x0[i] = rng.normal();
  }
  return e;
}

}  // namespace descon::cfg
