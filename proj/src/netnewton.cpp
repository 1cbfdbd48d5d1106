#include "descon/netnewton.hpp"

#include <cmath>

namespace descon::nn {

Mat dii_matrix(const PenaltyObjective& P, int i, const Vec& x_i) {
  return P.alpha * P.locals[i].hessian(x_i) +
         2.0 * (1.0 - P.weights.W(i, i)) * Mat::Identity(P.p, P.p);
}

SplittingBlocks splitting_blocks(const PenaltyObjective& P, int i, const Vec& x_i) {
  SplittingBlocks blocks;
  blocks.D_ii = dii_matrix(P, i, x_i);
  const Mat I = Mat::Identity(P.p, P.p);
  for (int j : P.top.neighbors[i]) blocks.B_row.emplace_back(j, P.weights.W(i, j) * I);
  blocks.B_row.emplace_back(i, (1.0 - P.weights.W(i, i)) * I);
  return blocks;
}

void validate(const Config& cfg) {
  require(cfg.K >= 0, "K must be nonnegative");
  require(cfg.eps > 0.0 && cfg.eps <= 1.0, "eps must lie in (0,1]");
  require(cfg.alpha_divisor > 1.0, "alpha_divisor must exceed 1");
  require(cfg.alpha_floor > 0.0, "alpha_floor must be positive");
}

State make_state(const PenaltyObjective& P, Vec y0) {
  require(y0.size() == P.np(), "iterate dimension mismatch");
  State s;
  s.y = std::move(y0);
  s.d = Vec::Zero(P.np());
  refresh_gradient(s, P);
  return s;
}

void refresh_gradient(State& s, const PenaltyObjective& P) { s.g = P.gradient(s.y); }

void compute_direction(State& s, const PenaltyObjective& P, int K) {
  require(K >= 0, "K must be nonnegative");
  const int p = P.p;
  std::vector<Eigen::LLT<Mat>> solvers;
  solvers.reserve(P.n());
  for (int i = 0; i < P.n(); ++i) {
    solvers.emplace_back(dii_matrix(P, i, P.block(s.y, i)));
    require(solvers.back().info() == Eigen::Success,
            "splitting diagonal block is not positive definite");
  }
  Vec d(P.np());
  for (int i = 0; i < P.n(); ++i)
    d.segment(i * p, p) = -solvers[i].solve(s.g.segment(i * p, p));
  for (int k = 0; k < K; ++k) {
    Vec next(P.np());
    for (int i = 0; i < P.n(); ++i) {
      const Vec mixed = neighbor_mix(P, i, 1.0 - P.weights.W(i, i),
                                     [&](int j) { return Vec(d.segment(j * p, p)); });
      next.segment(i * p, p) = solvers[i].solve(mixed - s.g.segment(i * p, p));
    }
    d = next;
  }
  s.d = std::move(d);
}

void apply_step(State& s, const PenaltyObjective& P, double eps) {
  require(s.d.size() == P.np(), "direction not computed");
  s.y += eps * s.d;
  ++s.t;
  refresh_gradient(s, P);
}

void dgd_step(State& s, const PenaltyObjective& P, double eps) {
  s.y -= eps * s.g;
  ++s.t;
  refresh_gradient(s, P);
}

double guaranteed_stepsize(double m, double L, double lambda, double Lambda, double F0_gap) {
  require(m > 0.0 && lambda > 0.0 && Lambda > 0.0, "stepsize: constants must be positive");
  require(L >= 0.0, "stepsize: L must be nonnegative");
  require(F0_gap >= 0.0, "stepsize: initial gap must be nonnegative");
  if (L == 0.0 || F0_gap == 0.0) return 1.0;
  const double raw =
      std::sqrt(3.0 * m * std::pow(lambda, 2.5) / (L * std::pow(Lambda, 3.0) * std::sqrt(F0_gap)));
  return std::min(1.0, raw);
}

RoundOutcome ann_round(State& s, SignalBoard& board, PenaltyObjective& P, const Config& cfg,
                       double tol) {
  require(board.bits.rows() == P.n() && board.bits.cols() == P.n(),
          "signal board dimension mismatch");
  require(tol >= 0.0, "signal threshold must be nonnegative");
  RoundOutcome out;
  for (int i = 0; i < P.n(); ++i) {
    if (board.bits(i, i) == 0 && s.g.segment(i * P.p, P.p).norm() <= tol)
      out.newly_signaling.push_back(i);
  }
  for (int origin : out.newly_signaling)
    for (int i = 0; i < P.n(); ++i) board.bits(i, origin) = 1;
  bool complete = P.n() > 0;
  for (int i = 0; i < P.n(); ++i) complete = complete && board.row_complete(i);
  if (complete && P.alpha > cfg.alpha_floor) {
    P.alpha = std::max(P.alpha / cfg.alpha_divisor, cfg.alpha_floor);
    board.bits.setZero();
    refresh_gradient(s, P);
    out.alpha_updated = true;
  }
  return out;
}

}  // namespace descon::nn
