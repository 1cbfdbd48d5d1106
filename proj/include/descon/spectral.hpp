#pragma once

#include <string>
#include <vector>

#include "descon/netnewton.hpp"
#include "descon/penalty.hpp"

namespace descon::spectral {

// One certified two-sided eigenvalue bound: every eigenvalue of the measured
// matrix must lie in [lo - slack, hi + slack].
struct BoundCheck {
  std::string name;
  double lo = 0.0, hi = 0.0;
  double measured_min = 0.0, measured_max = 0.0;
  double slack = 0.0;
  bool pass = false;
};

struct SplittingReport {
  int K = 0;
  double alpha = 0.0, m = 0.0, M = 0.0, delta = 0.0, Delta = 0.0;
  double rho = 0.0;      // 2(1-delta) / (2(1-delta) + alpha m)
  double rho_alt = 0.0;  // 2(1-delta) / (alpha + 2(1-delta)), reported only
  double rho_pow = 0.0;  // rho^{K+1}
  double lambda = 0.0;   // certified lower bound on eig(Hhat^{-1})
  double Lambda = 0.0;   // certified upper bound on eig(Hhat^{-1})
  std::vector<BoundCheck> bounds;
  bool pass = false;

  const BoundCheck* find(const std::string& name) const;
};

// Assembles H, D, B, S = D^{-1/2} B D^{-1/2}, the truncated-series inverse
// Hhat^{-1} = D^{-1/2} (sum_{k<=K} S^k) D^{-1/2} and the approximation error
// E = I - Hhat^{-1/2} H Hhat^{-1/2} at the point y, then certifies every
// spectral bound by dense symmetric eigendecomposition. Numeric slack is
// 1e-8 scaled by each matrix's spectral norm.
SplittingReport certify_splitting(const PenaltyObjective& P, const Vec& y, int K);

// lambda = 1/(2(1-delta) + alpha M),
// Lambda = (1 - rho^{K+1}) / ((1-rho)(2(1-Delta) + alpha m)).
struct SeriesEnvelope {
  double rho = 0.0, rho_alt = 0.0, rho_pow = 0.0, lambda = 0.0, Lambda = 0.0;
};
SeriesEnvelope series_envelope(double alpha, double m, double M, double delta, double Delta,
                               int K);

struct RateConstants {
  double eps = 0.0;
  double zeta = 0.0;    // per-iteration decrease factor is (1 - zeta)
  double gamma1 = 0.0;  // transient amplification coefficient
  double gamma2 = 0.0;  // quadratic-term coefficient
  bool stepsize_rule_satisfied = false;  // 0 < zeta < 1
};

RateConstants rate_constants(double alpha, const CurvatureConstants& c, double delta,
                             double Delta, double lambda, double Lambda, double eps,
                             double F0_gap);

struct EnvelopeCheck {
  bool pass = false;
  int worst_t = 0;
  double worst_ratio = 0.0;  // max_t gap_t / ((1-zeta)^t gap_0)
};

// Verifies F(y_t) - F* <= (1-zeta)^t (F(y_0) - F*) within a 1e-9 relative
// slack for the whole gap series. Throws if zeta lies outside (0, 1).
EnvelopeCheck check_linear_envelope(const std::vector<double>& F_gap, double zeta);

// Per-iteration audit of the weighted-gradient recursion
//   v_{t+1} <= eta_t v_t + eps^2 gamma2 v_t^2,
//   eta_t = (1 - eps + eps rho^{K+1}) (1 + gamma1 (1-zeta)^{(t-1)/4}),
// where v_t = ||D_{t-1}^{-1/2} g_t||. Iterations with eta_t < 1 whose v_t
// falls in [sqrt(eta)(1-sqrt(eta)), (1-sqrt(eta))) / (eps^2 gamma2) are
// flagged and must contract quadratically:
//   v_{t+1} <= eps^2 gamma2 / (1 - sqrt(eta_t)) * v_t^2.
struct RecursionReport {
  struct Row {
    int t = 0;
    double eta = 0.0;
    double v = 0.0, v_next = 0.0;
    double rhs = 0.0;
    bool recursion_ok = false;
    bool flagged = false;
    bool quad_ok = true;
    double interval_lo = 0.0, interval_hi = 0.0, rhs_quad = 0.0;
  };
  std::vector<Row> rows;
  int t0 = -1;  // first t with eta_t < 1, -1 if none
  bool all_recursion_ok = true;
  bool all_quad_ok = true;
  int num_flagged = 0;
  bool quadratic_phase_vacuous = false;
  std::string note;
};

RecursionReport check_gradient_recursion(const std::vector<double>& wgn_prev,
                                         const RateConstants& rc, double rho, int K);

struct AlphaGapRow {
  double alpha = 0.0;
  double gap = 0.0;    // || y*(alpha) - consensus optimum ||
  double ratio = 0.0;  // gap (1 - rho_w) / alpha
};

struct AlphaGapStudy {
  std::vector<AlphaGapRow> rows;  // sorted by alpha descending
  double rho_w = 0.0;
  double spread_smaller_half = 0.0;  // max/min ratio over the smaller alphas
  bool bounded = false;              // spread <= 10
};

AlphaGapStudy alpha_gap_study(const Topology& top, const WeightMatrix& w,
                              const std::vector<LocalObjective>& locals,
                              std::vector<double> alpha_grid, double tol = 1e-9);

}  // namespace descon::spectral
