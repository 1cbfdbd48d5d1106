#pragma once

#include <cmath>

namespace descon {

template <class ValueFn, class GradFn, class HessFn>
NewtonResult damped_newton(const Vec& x0, ValueFn&& value, GradFn&& grad, HessFn&& hess,
                           double grad_tol, int max_iters) {
  NewtonResult res;
  res.x = x0;
  double fx = value(res.x);
  for (res.iters = 0; res.iters < max_iters; ++res.iters) {
    const Vec g = grad(res.x);
    if (g.norm() <= grad_tol) break;
    const Mat H = hess(res.x);
    Eigen::LLT<Mat> llt(H);
    Vec step;
    if (llt.info() == Eigen::Success) {
      step = -llt.solve(g);
    } else {
      Eigen::LDLT<Mat> ldlt(H);
      require(ldlt.info() == Eigen::Success, "damped newton: indefinite hessian");
      step = -ldlt.solve(g);
    }
    const double slope = g.dot(step);
    require(slope < 0.0, "damped newton: not a descent direction");
    // Sufficient decrease, accepted up to the rounding floor of the value
    // evaluation; without the floor the backtracking stalls once the
    // predicted decrease drops below one ulp of f and tight gradient
    // tolerances become unreachable.
    const double noise = 1e-15 * (std::abs(fx) + 1.0);
    double t = 1.0;
    while (true) {
      const Vec trial = res.x + t * step;
      const double ft = value(trial);
      if (ft <= fx + 1e-4 * t * slope + noise) {
        res.x = trial;
        fx = ft;
        break;
      }
      t *= 0.5;
      require(t >= 0x1.0p-60, "damped newton: line search failed");
    }
  }
  res.value = fx;
  return res;
}

}  // namespace descon
