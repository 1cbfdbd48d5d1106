#include "descon/admm.hpp"

#include <cmath>

#include "descon/penalty.hpp"

namespace descon::admm {

void validate(const Config& cfg) {
  require(cfg.c > 0.0, "c must be positive");
  require(cfg.rho_lin > 0.0, "rho_lin must be positive");
  require(cfg.inner_tol > 0.0, "inner_tol must be positive");
}

State make_state(const IncidenceSet& inc, const Vec& x0) {
  require(x0.size() == inc.A_s.cols(), "iterate dimension mismatch");
  State s;
  s.x = x0;
  s.z = 0.5 * inc.E_u * x0;
  s.alpha = Vec::Zero(inc.A_s.rows());
  s.phi = Vec::Zero(x0.size());
  return s;
}

Vec x_update_dqm(const LocalObjective& f, double c, int degree, const Vec& x_i,
                 const Vec& neighbor_sum, const Vec& phi_i) {
  const Mat H = f.hessian(x_i);
  const int p = static_cast<int>(x_i.size());
  const Mat lhs = 2.0 * c * degree * Mat::Identity(p, p) + H;
  const Vec rhs = c * degree * x_i + c * neighbor_sum + H * x_i - f.gradient(x_i) - phi_i;
  return Eigen::LLT<Mat>(lhs).solve(rhs);
}

Vec x_update_dlm(const LocalObjective& f, double c, double rho_lin, int degree, const Vec& x_i,
                 const Vec& neighbor_sum, const Vec& phi_i) {
  const Vec rhs =
      c * degree * x_i + c * neighbor_sum + rho_lin * x_i - f.gradient(x_i) - phi_i;
  return rhs / (2.0 * c * degree + rho_lin);
}

Vec x_update_dadmm(const LocalObjective& f, double c, int degree, const Vec& x_i,
                   const Vec& neighbor_sum, const Vec& phi_i, double inner_tol) {
  const int p = static_cast<int>(x_i.size());
  const Vec lin = phi_i - c * degree * x_i - c * neighbor_sum;
  if (f.kind() == LocalObjective::Kind::kQuadratic) {
    const Mat lhs = f.quad_A() + 2.0 * c * degree * Mat::Identity(p, p);
    return Eigen::LLT<Mat>(lhs).solve(-f.quad_b() - lin);
  }
  const NewtonResult res = damped_newton(
      x_i,
      [&](const Vec& v) { return f.value(v) + lin.dot(v) + c * degree * v.squaredNorm(); },
      [&](const Vec& v) { return Vec(f.gradient(v) + lin + 2.0 * c * degree * v); },
      [&](const Vec& v) {
        return Mat(f.hessian(v) + 2.0 * c * degree * Mat::Identity(p, p));
      },
      inner_tol, 100);
  const double res_norm =
      (f.gradient(res.x) + lin + 2.0 * c * degree * res.x).norm();
  require(res_norm <= inner_tol,
          "inner solver failed to reach inner_tol within 100 Newton steps");
  return res.x;
}

void step(State& s, const Topology& top, const IncidenceSet& inc,
          const std::vector<LocalObjective>& locals, const Config& cfg) {
  validate(cfg);
  const int p = inc.p;
  require(s.x.size() == top.n * p, "iterate dimension mismatch");
  Vec x_next(s.x.size());
  for (int i = 0; i < top.n; ++i) {
    Vec nb = Vec::Zero(p);
    for (int j : top.neighbors[i]) nb += s.x.segment(j * p, p);
    const Vec x_i = s.x.segment(i * p, p);
    const Vec phi_i = s.phi.segment(i * p, p);
    switch (cfg.variant) {
      case Variant::kDqm:
        x_next.segment(i * p, p) = x_update_dqm(locals[i], cfg.c, top.degree(i), x_i, nb, phi_i);
        break;
      case Variant::kDlm:
        x_next.segment(i * p, p) =
            x_update_dlm(locals[i], cfg.c, cfg.rho_lin, top.degree(i), x_i, nb, phi_i);
        break;
      case Variant::kDadmm:
        x_next.segment(i * p, p) =
            x_update_dadmm(locals[i], cfg.c, top.degree(i), x_i, nb, phi_i, cfg.inner_tol);
        break;
    }
  }
  for (int i = 0; i < top.n; ++i) {
    Vec nb = Vec::Zero(p);
    for (int j : top.neighbors[i]) nb += x_next.segment(j * p, p);
    s.phi.segment(i * p, p) +=
        cfg.c * (top.degree(i) * x_next.segment(i * p, p) - nb);
  }
  s.x = std::move(x_next);
  s.alpha += 0.5 * cfg.c * inc.E_o * s.x;
  s.z = 0.5 * inc.E_u * s.x;
  ++s.k;
}

Reference admm_reference(const Topology& top, const IncidenceSet& inc,
                         const std::vector<LocalObjective>& locals, double tol) {
  Reference ref;
  const Vec x_tilde = consensus_minimizer(locals, tol);
  const int p = inc.p;
  ref.x_star = Vec(top.n * p);
  for (int i = 0; i < top.n; ++i) ref.x_star.segment(i * p, p) = x_tilde;
  ref.z_star = 0.5 * inc.E_u * ref.x_star;
  Vec grad(top.n * p);
  ref.f_star = 0.0;
  for (int i = 0; i < top.n; ++i) {
    grad.segment(i * p, p) = locals[i].gradient(x_tilde);
    ref.f_star += locals[i].value(x_tilde);
  }
  Eigen::JacobiSVD<Mat> svd(inc.E_o.transpose(), Eigen::ComputeThinU | Eigen::ComputeThinV);
  ref.alpha_star = svd.solve(-grad);
  return ref;
}

double energy_value(const State& s, const Reference& ref, double c) {
  require(c > 0.0, "c must be positive");
  return c * (s.z - ref.z_star).squaredNorm() +
         (1.0 / c) * (s.alpha - ref.alpha_star).squaredNorm();
}

EnergyStep evaluate_energy_step(const State& before, const State& after, const Reference& ref,
                                const IncidenceSet& inc, const CurvatureConstants& cc,
                                const Config& cfg, const EnergyParams& ep) {
  require(inc.gamma_u > 0.0,
          "contraction diagnostics require a non-bipartite topology (gamma_u > 0)");
  require(ep.mu > 1.0 && ep.mu_prime > 1.0, "mu and mu_prime must exceed 1");
  require(cc.m > 0.0, "contraction diagnostics need strongly convex locals");

  EnergyStep es;
  es.V_before = energy_value(before, ref, cfg.c);
  es.V_after = energy_value(after, ref, cfg.c);
  es.zeta_k = std::min(0.5 * cc.L * (after.x - before.x).norm(), 2.0 * cc.M);

  const double gu2 = inc.gamma_u * inc.gamma_u;
  const double go2 = inc.gamma_o * inc.gamma_o;
  const double Gu2 = inc.Gamma_u * inc.Gamma_u;
  if (es.zeta_k > 0.0)
    require(cfg.c > es.zeta_k * es.zeta_k / (cc.m * gu2),
            "penalty coefficient c too small: contraction requires c > zeta_k^2/(m gamma_u^2)");

  if (ep.eta.has_value()) {
    es.eta_used = *ep.eta;
    require(es.eta_used > 0.0, "eta must be positive");
    if (es.zeta_k > 0.0)
      require(es.eta_used > es.zeta_k / cc.m && es.eta_used < cfg.c * gu2 / es.zeta_k,
              "eta outside its admissible interval (zeta_k/m, c gamma_u^2/zeta_k)");
  } else {
    es.eta_used =
        es.zeta_k > 0.0 ? 0.5 * (es.zeta_k / cc.m + cfg.c * gu2 / es.zeta_k) : 1.0;
  }

  const auto delta_at = [&](double zeta, double eta) {
    const double mu = ep.mu, mup = ep.mu_prime;
    const double num1 = cfg.c - eta * zeta / gu2;
    const double den1 = (4.0 * mup * mu * zeta * zeta / (cfg.c * (mup - 1.0) * (mu - 1.0))) /
                            (gu2 * go2) +
                        (mup * mu / (mu - 1.0)) * Gu2 / go2;
    const double num2 = cc.m - (zeta > 0.0 ? zeta / eta : 0.0);
    const double den2 = 0.25 * cfg.c * Gu2 + (mu / cfg.c) * cc.M * cc.M / go2;
    return std::min(num1 / den1, num2 / den2);
  };
  es.delta_k = delta_at(es.zeta_k, es.eta_used);
  es.limit_delta = delta_at(0.0, es.eta_used);

  es.contraction_ok = es.V_after * (1.0 + es.delta_k) <= es.V_before + 1e-9;
  es.recovery_bound = 4.0 / (cfg.c * gu2) * es.V_after;
  es.recovery_ok = (after.x - ref.x_star).squaredNorm() <= es.recovery_bound + 1e-9;
  return es;
}

}  // namespace descon::admm
