#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "descon/penalty.hpp"

namespace descon::nn {

// Hessian splitting H = D - B with
//   D_ii = alpha hess f_i(x_i) + 2 (1 - w_ii) I,
//   B_ii = (1 - w_ii) I,  B_ij = w_ij I on edges.
struct SplittingBlocks {
  Mat D_ii;
  std::vector<std::pair<int, Mat>> B_row;  // (j, B_ij) for j in N_i then j = i
};

SplittingBlocks splitting_blocks(const PenaltyObjective& P, int i, const Vec& x_i);
Mat dii_matrix(const PenaltyObjective& P, int i, const Vec& x_i);

// own_coeff * reader(i) + sum_{j in N_i} w_ij * reader(j). Both the direct
// solvers and the simulated nodes express their neighbor sums through this,
// so the two execution paths share one formula.
template <class Reader>
Vec neighbor_mix(const PenaltyObjective& P, int i, double own_coeff, Reader&& reader) {
  Vec acc = own_coeff * reader(i);
  for (int j : P.top.neighbors[i]) acc += P.weights.W(i, j) * reader(j);
  return acc;
}

// g_i = (1 - w_ii) x_i - sum_j w_ij x_j + alpha grad f_i(x_i), with the
// neighbor values supplied by the reader.
template <class Reader>
Vec gradient_node(const PenaltyObjective& P, int i, Reader&& reader) {
  const Vec own = reader(i);
  return own - neighbor_mix(P, i, P.weights.W(i, i), reader) +
         P.alpha * P.locals[i].gradient(own);
}

struct Config {
  int K = 1;
  double eps = 1.0;
  bool adaptive = false;       // fixed penalty when false
  double tol = -1.0;           // signal threshold; < 0 means 1e-3 ||g_0||
  double alpha_divisor = 10.0;
  double alpha_floor = 1e-8;
};

void validate(const Config& cfg);

struct State {
  Vec y, g, d;
  int t = 0;
};

State make_state(const PenaltyObjective& P, Vec y0);
void refresh_gradient(State& s, const PenaltyObjective& P);

// Truncated-series direction: d^0_i = -D_ii^{-1} g_i, then K refinements
// d^{k+1}_i = D_ii^{-1} (B_ii d^k_i + sum_j B_ij d^k_j - g_i). Each
// refinement consumes exactly one neighbor exchange of d.
void compute_direction(State& s, const PenaltyObjective& P, int K);

// y <- y + eps d, then the gradient is refreshed.
void apply_step(State& s, const PenaltyObjective& P, double eps);

// Plain first-order update y <- y - eps g.
void dgd_step(State& s, const PenaltyObjective& P, double eps);

// Largest step size with a certified linear decrease of the penalty gap:
// min{ 1, sqrt(3 m lambda^{5/2} / (L Lambda^3 sqrt(F0_gap))) }. Returns 1
// when the curvature is quadratic (L = 0) or the start is already optimal.
double guaranteed_stepsize(double m, double L, double lambda, double Lambda, double F0_gap);

// Signal board for the adaptive penalty schedule. bits(i, j) is node i's
// record of node j having reported a small gradient; rows agree across
// nodes after every delivery in the synchronous model.
struct SignalBoard {
  Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> bits;
  explicit SignalBoard(int n) { bits.setZero(n, n); }
  bool row_complete(int i) const { return bits.row(i).minCoeff() == 1; }
};

struct RoundOutcome {
  std::vector<int> newly_signaling;
  bool alpha_updated = false;
};

// One signaling round: nodes whose gradient norm is at or below tol set
// their own bit and broadcast it; delivery happens at this round's barrier;
// once a row is complete every node divides alpha by alpha_divisor (bits
// reset, floor respected) and the gradient is recomputed under the new
// alpha before the next descent step.
RoundOutcome ann_round(State& s, SignalBoard& board, PenaltyObjective& P, const Config& cfg,
                       double tol);

}  // namespace descon::nn
