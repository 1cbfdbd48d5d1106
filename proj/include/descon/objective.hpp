#pragma once

#include <string>
#include <vector>

#include "descon/common.hpp"
#include "descon/topology.hpp"

namespace descon {

struct LocalEval {
  double value = 0.0;
  Vec grad;
  Mat hess;
};

// m: strong convexity, M: smoothness, L: Hessian Lipschitz constant.
struct CurvatureConstants {
  double m = 0.0;
  double M = 0.0;
  double L = 0.0;
  bool approximate = false;  // true when estimated rather than certified
};

// One node's private objective. Quadratics carry the constant that completes
// the square, so a quadratic built from (A, b) evaluates as
// 1/2 (x + A^{-1} b)' A (x + A^{-1} b) and its minimum value is zero.
class LocalObjective {
 public:
  enum class Kind { kQuadratic, kLogistic };

  static LocalObjective quadratic(Mat A, Vec b);
  static LocalObjective quadratic_centered(Mat A, const Vec& target);
  // samples: one row per observation, labels in {-1, +1},
  // f(x) = sum_l log(1 + exp(-y_l s_l' x)) + reg/2 ||x||^2.
  static LocalObjective logistic(Mat samples, std::vector<int> labels, double reg);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  double reg() const { return reg_; }
  const Mat& quad_A() const { return A_; }
  const Vec& quad_b() const { return b_; }
  const Mat& samples() const { return samples_; }
  const std::vector<int>& labels() const { return labels_; }

  LocalEval evaluate(const Vec& x) const;
  double value(const Vec& x) const;
  Vec gradient(const Vec& x) const;
  Mat hessian(const Vec& x) const;

  // Certified bounds: quadratic -> (eig_min A, eig_max A, 0);
  // logistic -> (reg, reg + 1/4 sum ||s_l||^2, sum ||s_l||^3 / (6 sqrt 3)).
  // Throws for logistic with reg = 0 (not strongly convex).
  CurvatureConstants curvature() const;
  // Sublevel-set estimate anchored at x_ref, for unregularized logistic runs
  // where no certified m exists. Flagged approximate.
  CurvatureConstants curvature_estimated(const Vec& x_ref) const;

 private:
  LocalObjective() = default;
  Kind kind_ = Kind::kQuadratic;
  int dim_ = 0;
  Mat A_;
  Vec b_;
  double c0_ = 0.0;
  Mat samples_;
  std::vector<int> labels_;
  double reg_ = 0.0;
};

CurvatureConstants aggregate_curvature(const std::vector<LocalObjective>& locals);
CurvatureConstants aggregate_curvature_estimated(const std::vector<LocalObjective>& locals,
                                                 const Vec& x_ref);

// CSV with header "label,feature_1,...,feature_p"; labels must be -1 or +1.
struct Dataset {
  Mat samples;
  std::vector<int> labels;
};
Dataset load_dataset_csv(const std::string& path);

// Per-node synthetic instances, deterministic in the seed.
std::vector<LocalObjective> synth_quadratics(int n, int p, double cond, std::uint64_t seed);
// Features ~ scale * N(0, I); labels from a random hyperplane with
// flip_prob label noise. One (q x p) sample block per node.
std::vector<LocalObjective> synth_logistics(int n, int p, int q, double reg, double scale,
                                            double flip_prob, std::uint64_t seed);

}  // namespace descon
