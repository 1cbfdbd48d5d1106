#include "descon/penalty.hpp"

namespace descon {

PenaltyObjective make_penalty(Topology top, WeightMatrix w, std::vector<LocalObjective> locals,
                              double alpha) {
  require(static_cast<int>(locals.size()) == top.n, "penalty: one local objective per node");
  require(alpha > 0.0, "alpha must be positive");
  const int p = locals[0].dim();
  for (const auto& f : locals)
    require(f.dim() == p, "penalty: all local objectives must share the dimension");
  PenaltyObjective P;
  P.top = std::move(top);
  P.weights = std::move(w);
  P.locals = std::move(locals);
  P.alpha = alpha;
  P.p = p;
  return P;
}

Vec PenaltyObjective::consensus_gradient_node(const Vec& y, int i) const {
  Vec acc = (1.0 - weights.W(i, i)) * block(y, i);
  for (int j : top.neighbors[i]) acc -= weights.W(i, j) * block(y, j);
  return acc;
}

double PenaltyObjective::value(const Vec& y) const {
  require(y.size() == np(), "penalty: iterate dimension mismatch");
  double F = 0.0;
  for (int i = 0; i < n(); ++i) {
    F += 0.5 * block(y, i).dot(consensus_gradient_node(y, i));
    F += alpha * locals[i].value(block(y, i));
  }
  return F;
}

Vec PenaltyObjective::gradient(const Vec& y) const {
  require(y.size() == np(), "penalty: iterate dimension mismatch");
  Vec g(np());
  for (int i = 0; i < n(); ++i)
    g.segment(i * p, p) =
        consensus_gradient_node(y, i) + alpha * locals[i].gradient(block(y, i));
  return g;
}

Mat PenaltyObjective::hessian(const Vec& y) const {
  require(y.size() == np(), "penalty: iterate dimension mismatch");
  Mat H = Mat::Zero(np(), np());
  const Mat I = Mat::Identity(p, p);
  for (int i = 0; i < n(); ++i) {
    H.block(i * p, i * p, p, p) =
        (1.0 - weights.W(i, i)) * I + alpha * locals[i].hessian(block(y, i));
    for (int j : top.neighbors[i]) H.block(i * p, j * p, p, p) = -weights.W(i, j) * I;
  }
  return H;
}

double PenaltyObjective::aggregate_local(const Vec& x) const {
  require(x.size() == np(), "penalty: iterate dimension mismatch");
  double v = 0.0;
  for (int i = 0; i < n(); ++i) v += locals[i].value(block(x, i));
  return v;
}

CentralizedReference centralized_reference(const PenaltyObjective& P, double tol) {
  require(tol > 0.0, "reference: tol must be positive");
  const double thr = tol * 1e-3;
  CentralizedReference ref;
  const NewtonResult pen = damped_newton(
      Vec::Zero(P.np()), [&](const Vec& y) { return P.value(y); },
      [&](const Vec& y) { return P.gradient(y); }, [&](const Vec& y) { return P.hessian(y); },
      thr);
  ref.y_star = pen.x;
  ref.F_star = pen.value;
  ref.x_tilde_star = consensus_minimizer(P.locals, tol);
  double f = 0.0;
  for (const auto& loc : P.locals) f += loc.value(ref.x_tilde_star);
  ref.f_tilde_star = f;
  return ref;
}

Vec consensus_minimizer(const std::vector<LocalObjective>& locals, double tol) {
  require(!locals.empty(), "reference: empty objective list");
  require(tol > 0.0, "reference: tol must be positive");
  const int p = locals[0].dim();
  const NewtonResult res = damped_newton(
      Vec::Zero(p),
      [&](const Vec& x) {
        double v = 0.0;
        for (const auto& f : locals) v += f.value(x);
        return v;
      },
      [&](const Vec& x) {
        Vec g = Vec::Zero(p);
        for (const auto& f : locals) g += f.gradient(x);
        return g;
      },
      [&](const Vec& x) {
        Mat H = Mat::Zero(p, p);
        for (const auto& f : locals) H += f.hessian(x);
        return H;
      },
      tol * 1e-3);
  return res.x;
}

}  // namespace descon
