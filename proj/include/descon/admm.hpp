#pragma once

#include <optional>
#include <vector>

#include "descon/objective.hpp"
#include "descon/topology.hpp"

namespace descon::admm {

enum class Variant { kDadmm, kDlm, kDqm };

struct Config {
  Variant variant = Variant::kDqm;
  double c = 1.0;          // augmented-Lagrangian coefficient
  double rho_lin = 1.0;    // proximal coefficient (DLM only)
  double inner_tol = 1e-12;  // DADMM inner Newton tolerance
};

void validate(const Config& cfg);

// Iterates carry the primal stack plus the edge-space bookkeeping. Under the
// standard zero start, z_k = 1/2 E_u x_k and beta_k = -alpha_k hold
// identically; phi = E_o' alpha is the per-node multiplier the decentralized
// updates actually use. z is stored per directed edge, so the two copies of
// every undirected edge coincide.
struct State {
  int k = 0;
  Vec x;      // np
  Vec z;      // mp
  Vec alpha;  // mp
  Vec phi;    // np
};

State make_state(const IncidenceSet& inc, const Vec& x0);

// One synchronous iteration: variant-specific x-update, then
//   phi_i += c sum_{j in N_i} (x_i - x_j),
//   alpha += (c/2) E_o x,   z = 1/2 E_u x.
void step(State& s, const Topology& top, const IncidenceSet& inc,
          const std::vector<LocalObjective>& locals, const Config& cfg);

// Node-level x-updates, shared with the simulated solvers. neighbor_sum is
// sum_{j in N_i} x_j from the latest exchange.
Vec x_update_dqm(const LocalObjective& f, double c, int degree, const Vec& x_i,
                 const Vec& neighbor_sum, const Vec& phi_i);
Vec x_update_dlm(const LocalObjective& f, double c, double rho_lin, int degree, const Vec& x_i,
                 const Vec& neighbor_sum, const Vec& phi_i);
Vec x_update_dadmm(const LocalObjective& f, double c, int degree, const Vec& x_i,
                   const Vec& neighbor_sum, const Vec& phi_i, double inner_tol);

struct Reference {
  Vec x_star;      // np consensus stack
  Vec z_star;      // mp
  Vec alpha_star;  // mp, minimum-norm solution of E_o' a = -grad f(x*)
  double f_star = 0.0;
};

Reference admm_reference(const Topology& top, const IncidenceSet& inc,
                         const std::vector<LocalObjective>& locals, double tol = 1e-9);

// Lyapunov energy V_k = c ||z_k - z*||^2 + (1/c) ||alpha_k - alpha*||^2.
double energy_value(const State& s, const Reference& ref, double c);

struct EnergyParams {
  double mu = 2.0;
  double mu_prime = 2.0;
  std::optional<double> eta;  // per-step midpoint of the admissible interval when absent
};

struct EnergyStep {
  double V_before = 0.0, V_after = 0.0;
  double zeta_k = 0.0;       // min{ L/2 ||x_{k+1} - x_k||, 2M }
  double eta_used = 0.0;
  double delta_k = 0.0;
  double limit_delta = 0.0;  // delta_k evaluated at zeta = 0
  double recovery_bound = 0.0;  // (4 / (c gamma_u^2)) V_after
  bool contraction_ok = false;   // V_after (1 + delta_k) <= V_before + 1e-9
  bool recovery_ok = false;     // ||x_after - x*||^2 <= recovery_bound + 1e-9
};

// Audits one iteration against the energy contraction. Requires a
// non-bipartite topology (gamma_u > 0) and an admissible c; a user-supplied
// eta outside its interval is rejected.
EnergyStep evaluate_energy_step(const State& before, const State& after, const Reference& ref,
                                const IncidenceSet& inc, const CurvatureConstants& cc,
                                const Config& cfg, const EnergyParams& ep);

}  // namespace descon::admm
