#include "descon/objective.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "descon/rng.hpp"

namespace descon {

namespace {

// log(1 + exp(t)) without overflow for large |t|.
double log1pexp(double t) {
  if (t > 30.0) return t + std::log1p(std::exp(-t));
  return std::log1p(std::exp(t));
}

// Logistic sigmoid evaluated in log space for large |t|.
double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

}  // namespace

LocalObjective LocalObjective::quadratic(Mat A, Vec b) {
  require(A.rows() == A.cols() && A.rows() == b.size(), "quadratic: dimension mismatch");
  require(A.isApprox(A.transpose(), 1e-12), "quadratic: A must be symmetric");
  Eigen::LLT<Mat> llt(A);
  require(llt.info() == Eigen::Success, "quadratic: A must be positive definite");
  LocalObjective f;
  f.kind_ = Kind::kQuadratic;
  f.dim_ = static_cast<int>(b.size());
  f.c0_ = 0.5 * b.dot(llt.solve(b));
  f.A_ = std::move(A);
  f.b_ = std::move(b);
  return f;
}

LocalObjective LocalObjective::quadratic_centered(Mat A, const Vec& target) {
  Vec b = -A * target;
  return quadratic(std::move(A), std::move(b));
}

LocalObjective LocalObjective::logistic(Mat samples, std::vector<int> labels, double reg) {
  require(samples.rows() == static_cast<Eigen::Index>(labels.size()),
          "logistic: one label per sample required");
  require(samples.rows() >= 1, "logistic: needs at least one sample");
  require(reg >= 0.0, "logistic: reg must be nonnegative");
  for (int y : labels) require(y == 1 || y == -1, "logistic: labels must be -1 or +1");
  LocalObjective f;
  f.kind_ = Kind::kLogistic;
  f.dim_ = static_cast<int>(samples.cols());
  f.samples_ = std::move(samples);
  f.labels_ = std::move(labels);
  f.reg_ = reg;
  return f;
}

double LocalObjective::value(const Vec& x) const {
  require(x.size() == dim_, "objective: argument dimension mismatch");
  if (kind_ == Kind::kQuadratic) return 0.5 * x.dot(A_ * x) + b_.dot(x) + c0_;
  double v = 0.5 * reg_ * x.squaredNorm();
  for (Eigen::Index l = 0; l < samples_.rows(); ++l)
    v += log1pexp(-labels_[l] * samples_.row(l).dot(x));
  return v;
}

Vec LocalObjective::gradient(const Vec& x) const {
  require(x.size() == dim_, "objective: argument dimension mismatch");
  if (kind_ == Kind::kQuadratic) return A_ * x + b_;
  Vec g = reg_ * x;
  for (Eigen::Index l = 0; l < samples_.rows(); ++l) {
    const double u = labels_[l] * samples_.row(l).dot(x);
    g += (sigmoid(u) - 1.0) * labels_[l] * samples_.row(l).transpose();
  }
  return g;
}

Mat LocalObjective::hessian(const Vec& x) const {
  require(x.size() == dim_, "objective: argument dimension mismatch");
  if (kind_ == Kind::kQuadratic) return A_;
  Mat h = reg_ * Mat::Identity(dim_, dim_);
  for (Eigen::Index l = 0; l < samples_.rows(); ++l) {
    const double u = labels_[l] * samples_.row(l).dot(x);
    const double s = sigmoid(u);
    h += s * (1.0 - s) * samples_.row(l).transpose() * samples_.row(l);
  }
  return h;
}

LocalEval LocalObjective::evaluate(const Vec& x) const {
  return LocalEval{value(x), gradient(x), hessian(x)};
}

CurvatureConstants LocalObjective::curvature() const {
  CurvatureConstants c;
  if (kind_ == Kind::kQuadratic) {
    Eigen::SelfAdjointEigenSolver<Mat> es(A_);
    require(es.info() == Eigen::Success, "quadratic: eigendecomposition failed");
    c.m = es.eigenvalues().minCoeff();
    c.M = es.eigenvalues().maxCoeff();
    c.L = 0.0;
    return c;
  }
  require(reg_ > 0.0, "logistic objective with reg = 0 is not strongly convex; set reg > 0");
  c.m = reg_;
  double sum2 = 0.0, sum3 = 0.0;
  for (Eigen::Index l = 0; l < samples_.rows(); ++l) {
    const double nrm = samples_.row(l).norm();
    sum2 += nrm * nrm;
    sum3 += nrm * nrm * nrm;
  }
  c.M = reg_ + 0.25 * sum2;
  c.L = sum3 / (6.0 * std::sqrt(3.0));
  return c;
}

CurvatureConstants LocalObjective::curvature_estimated(const Vec& x_ref) const {
  CurvatureConstants c;
  c.approximate = true;
  Eigen::SelfAdjointEigenSolver<Mat> es(hessian(x_ref));
  require(es.info() == Eigen::Success, "curvature estimate: eigendecomposition failed");
  c.m = es.eigenvalues().minCoeff();
  if (kind_ == Kind::kQuadratic) {
    c.M = es.eigenvalues().maxCoeff();
    c.L = 0.0;
    return c;
  }
  double sum2 = 0.0, sum3 = 0.0;
  for (Eigen::Index l = 0; l < samples_.rows(); ++l) {
    const double nrm = samples_.row(l).norm();
    sum2 += nrm * nrm;
    sum3 += nrm * nrm * nrm;
  }
  c.M = reg_ + 0.25 * sum2;
  c.L = sum3 / (6.0 * std::sqrt(3.0));
  return c;
}

CurvatureConstants aggregate_curvature(const std::vector<LocalObjective>& locals) {
  require(!locals.empty(), "curvature: empty objective list");
  CurvatureConstants agg = locals[0].curvature();
  for (std::size_t i = 1; i < locals.size(); ++i) {
    const CurvatureConstants c = locals[i].curvature();
    agg.m = std::min(agg.m, c.m);
    agg.M = std::max(agg.M, c.M);
    agg.L = std::max(agg.L, c.L);
  }
  return agg;
}

CurvatureConstants aggregate_curvature_estimated(const std::vector<LocalObjective>& locals,
                                                 const Vec& x_ref) {
  require(!locals.empty(), "curvature: empty objective list");
  CurvatureConstants agg = locals[0].curvature_estimated(x_ref);
  for (std::size_t i = 1; i < locals.size(); ++i) {
    const CurvatureConstants c = locals[i].curvature_estimated(x_ref);
    agg.m = std::min(agg.m, c.m);
    agg.M = std::max(agg.M, c.M);
    agg.L = std::max(agg.L, c.L);
  }
  agg.approximate = true;
  return agg;
}

Dataset load_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "dataset: cannot open " + path);
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), "dataset: empty file " + path);

  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(s);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
  };

  const auto header = split(line);
  require(header.size() >= 2 && header[0] == "label",
          "dataset: header must be label,feature_1,...");
  const int p = static_cast<int>(header.size()) - 1;
  for (int k = 0; k < p; ++k)
    require(header[k + 1] == "feature_" + std::to_string(k + 1),
            "dataset: unexpected feature column name '" + header[k + 1] + "'");

  std::vector<int> labels;
  std::vector<Vec> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split(line);
    require(cells.size() == header.size(),
            "dataset: wrong cell count on line " + std::to_string(lineno));
    std::size_t pos = 0;
    const int y = std::stoi(cells[0], &pos);
    require(y == 1 || y == -1, "dataset: label must be -1 or +1 on line " + std::to_string(lineno));
    Vec s(p);
    for (int k = 0; k < p; ++k) s(k) = std::stod(cells[k + 1]);
    labels.push_back(y);
    rows.push_back(std::move(s));
  }
  require(!rows.empty(), "dataset: no data rows in " + path);
  Dataset d;
  d.samples = Mat(rows.size(), p);
  for (std::size_t r = 0; r < rows.size(); ++r) d.samples.row(r) = rows[r].transpose();
  d.labels = std::move(labels);
  return d;
}

std::vector<LocalObjective> synth_quadratics(int n, int p, double cond, std::uint64_t seed) {
  require(n >= 1 && p >= 1 && cond >= 1.0, "synth quadratics: bad parameters");
  Rng rng(seed);
  std::vector<LocalObjective> locals;
  locals.reserve(n);
  for (int i = 0; i < n; ++i) {
    Mat G(p, p);
    for (int r = 0; r < p; ++r)
      for (int c = 0; c < p; ++c) G(r, c) = rng.normal();
    const Eigen::HouseholderQR<Mat> qr(G);
    Mat Q = qr.householderQ();
    Vec eigs(p);
    for (int k = 0; k < p; ++k)
      eigs(k) = std::exp(rng.uniform() * std::log(cond));  // in [1, cond]
    Mat A = Q * eigs.asDiagonal() * Q.transpose();
    A = 0.5 * (A + A.transpose());
    Vec target(p);
    for (int k = 0; k < p; ++k) target(k) = 2.0 * rng.normal();
    locals.push_back(LocalObjective::quadratic_centered(std::move(A), target));
  }
  return locals;
}

std::vector<LocalObjective> synth_logistics(int n, int p, int q, double reg, double scale,
                                            double flip_prob, std::uint64_t seed) {
  require(n >= 1 && p >= 1 && q >= 1, "synth logistics: bad parameters");
  require(scale > 0.0 && flip_prob >= 0.0 && flip_prob < 0.5, "synth logistics: bad noise model");
  Rng rng(seed);
  Vec w(p);
  for (int k = 0; k < p; ++k) w(k) = rng.normal();
  w.normalize();
  std::vector<LocalObjective> locals;
  locals.reserve(n);
  for (int i = 0; i < n; ++i) {
    Mat S(q, p);
    std::vector<int> y(q);
    for (int l = 0; l < q; ++l) {
      for (int k = 0; k < p; ++k) S(l, k) = scale * rng.normal();
      const int clean = S.row(l).dot(w) >= 0.0 ? 1 : -1;
      y[l] = rng.uniform() < flip_prob ? -clean : clean;
    }
    locals.push_back(LocalObjective::logistic(std::move(S), std::move(y), reg));
  }
  return locals;
}

}  // namespace descon
