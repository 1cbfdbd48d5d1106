#pragma once

#include <vector>

#include "descon/objective.hpp"
#include "descon/topology.hpp"

namespace descon {

// Penalized consensus objective on stacked iterates y in R^{np}:
//   F(y) = 1/2 y' (I - Z) y + alpha * sum_i f_i(y_i),  Z = W kron I_p.
// Gradients and function values are assembled from neighbor sums only.
struct PenaltyObjective {
  Topology top;
  WeightMatrix weights;
  std::vector<LocalObjective> locals;
  double alpha = 1.0;
  int p = 1;

  int n() const { return top.n; }
  int np() const { return top.n * p; }

  Eigen::Ref<const Vec> block(const Vec& y, int i) const { return y.segment(i * p, p); }

  // (1 - w_ii) y_i - sum_j w_ij y_j, the disagreement part of the gradient.
  Vec consensus_gradient_node(const Vec& y, int i) const;

  double value(const Vec& y) const;
  Vec gradient(const Vec& y) const;
  Mat hessian(const Vec& y) const;        // (I - Z) + alpha blockdiag(hess f_i)

  // Aggregate local cost sum_i f_i(x_i) of a stacked iterate (no penalty).
  double aggregate_local(const Vec& x) const;
};

PenaltyObjective make_penalty(Topology top, WeightMatrix w, std::vector<LocalObjective> locals,
                              double alpha);

struct CentralizedReference {
  Vec y_star;          // minimizer of F at this alpha
  double F_star = 0.0;
  Vec x_tilde_star;    // p-dim minimizer of sum_i f_i
  double f_tilde_star = 0.0;
};

// Damped Newton from zero on both problems, run to gradient norm <= tol*1e-3.
CentralizedReference centralized_reference(const PenaltyObjective& P, double tol = 1e-7);

// Minimizer of sum_i f_i alone (p-dim), same solver and threshold rule.
Vec consensus_minimizer(const std::vector<LocalObjective>& locals, double tol = 1e-7);

// Generic damped Newton used by the references and the DADMM inner solver.
struct NewtonResult {
  Vec x;
  double value = 0.0;
  int iters = 0;
};
template <class ValueFn, class GradFn, class HessFn>
NewtonResult damped_newton(const Vec& x0, ValueFn&& value, GradFn&& grad, HessFn&& hess,
                           double grad_tol, int max_iters = 200);

}  // namespace descon

#include "descon/penalty_inl.hpp"
