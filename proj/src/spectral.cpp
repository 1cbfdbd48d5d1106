#include "descon/spectral.hpp"

#include <algorithm>
#include <cmath>

namespace descon::spectral {

namespace {

std::pair<double, double> eig_range(const Mat& A) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (A + A.transpose()));
  require(es.info() == Eigen::Success, "eigendecomposition failed");
  return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

BoundCheck make_check(std::string name, double lo, double hi, const Mat& A) {
  auto [mn, mx] = eig_range(A);
  BoundCheck c;
  c.name = std::move(name);
  c.lo = lo;
  c.hi = hi;
  c.measured_min = mn;
  c.measured_max = mx;
  c.slack = 1e-8 * std::max({std::abs(mn), std::abs(mx), 1.0});
  c.pass = mn >= lo - c.slack && mx <= hi + c.slack;
  return c;
}

// Symmetric inverse square root assembled per diagonal block.
Mat block_inv_sqrt(const PenaltyObjective& P, const Vec& y) {
  const int p = P.p;
  Mat R = Mat::Zero(P.np(), P.np());
  for (int i = 0; i < P.n(); ++i) {
    Eigen::SelfAdjointEigenSolver<Mat> es(nn::dii_matrix(P, i, P.block(y, i)));
    require(es.info() == Eigen::Success, "eigendecomposition failed");
    require(es.eigenvalues().minCoeff() > 0.0,
            "splitting diagonal block is not positive definite");
    const Vec inv_sqrt = es.eigenvalues().cwiseSqrt().cwiseInverse();
    R.block(i * p, i * p, p, p) =
        es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().transpose();
  }
  return R;
}

Mat sym_sqrt(const Mat& A) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (A + A.transpose()));
  require(es.info() == Eigen::Success, "eigendecomposition failed");
  require(es.eigenvalues().minCoeff() >= 0.0, "matrix square root of an indefinite matrix");
  return es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() *
         es.eigenvectors().transpose();
}

}  // namespace

const BoundCheck* SplittingReport::find(const std::string& name) const {
  for (const auto& b : bounds)
    if (b.name == name) return &b;
  return nullptr;
}

SeriesEnvelope series_envelope(double alpha, double m, double M, double delta, double Delta,
                               int K) {
  require(alpha > 0.0 && m > 0.0 && M >= m, "series envelope: bad curvature constants");
  require(delta > 0.0 && Delta >= delta && Delta < 1.0, "series envelope: bad weight bounds");
  require(K >= 0, "series envelope: K must be nonnegative");
  SeriesEnvelope e;
  const double two_1d = 2.0 * (1.0 - delta);
  e.rho = two_1d / (two_1d + alpha * m);
  e.rho_alt = two_1d / (alpha + two_1d);
  e.rho_pow = std::pow(e.rho, K + 1);
  e.lambda = 1.0 / (two_1d + alpha * M);
  e.Lambda = (1.0 - e.rho_pow) / ((1.0 - e.rho) * (2.0 * (1.0 - Delta) + alpha * m));
  return e;
}

SplittingReport certify_splitting(const PenaltyObjective& P, const Vec& y, int K) {
  require(y.size() == P.np(), "certify: iterate dimension mismatch");
  require(K >= 0, "certify: K must be nonnegative");
  require(P.np() <= 500,
          "certify: problem dimension np > 500; certify a sampled sub-instance instead");
  const CurvatureConstants c = aggregate_curvature(P.locals);
  const WeightBounds wb = check_weight_bounds(P.top, P.weights);

  SplittingReport rep;
  rep.K = K;
  rep.alpha = P.alpha;
  rep.m = c.m;
  rep.M = c.M;
  rep.delta = wb.delta;
  rep.Delta = wb.Delta;
  const SeriesEnvelope env = series_envelope(P.alpha, c.m, c.M, wb.delta, wb.Delta, K);
  rep.rho = env.rho;
  rep.rho_alt = env.rho_alt;
  rep.rho_pow = env.rho_pow;
  rep.lambda = env.lambda;
  rep.Lambda = env.Lambda;

  const int p = P.p;
  const Mat H = P.hessian(y);
  Mat D = Mat::Zero(P.np(), P.np());
  Mat B = Mat::Zero(P.np(), P.np());
  const Mat I_p = Mat::Identity(p, p);
  for (int i = 0; i < P.n(); ++i) {
    D.block(i * p, i * p, p, p) = nn::dii_matrix(P, i, P.block(y, i));
    B.block(i * p, i * p, p, p) = (1.0 - P.weights.W(i, i)) * I_p;
    for (int j : P.top.neighbors[i]) B.block(i * p, j * p, p, p) = P.weights.W(i, j) * I_p;
  }

  const Mat Dis = block_inv_sqrt(P, y);
  const Mat S = Dis * B * Dis;
  Mat series = Mat::Identity(P.np(), P.np());
  for (int k = 0; k < K; ++k) series = Mat::Identity(P.np(), P.np()) + S * series;
  const Mat Hhat_inv = Dis * series * Dis;
  const Mat Hhat_inv_sqrt = sym_sqrt(Hhat_inv);
  const Mat E = Mat::Identity(P.np(), P.np()) - Hhat_inv_sqrt * H * Hhat_inv_sqrt;

  const double two_1d = 2.0 * (1.0 - wb.delta);
  const double two_1D = 2.0 * (1.0 - wb.Delta);
  rep.bounds.push_back(
      make_check("hessian", P.alpha * c.m, two_1d + P.alpha * c.M, H));
  rep.bounds.push_back(
      make_check("splitting_diagonal", two_1D + P.alpha * c.m, two_1d + P.alpha * c.M, D));
  rep.bounds.push_back(make_check("splitting_offdiagonal", 0.0, two_1d, B));
  rep.bounds.push_back(make_check("normalized_offdiagonal", 0.0, rep.rho, S));
  rep.bounds.push_back(make_check("series_error", 0.0, rep.rho_pow, E));
  rep.bounds.push_back(make_check("approximate_inverse", rep.lambda, rep.Lambda, Hhat_inv));

  rep.pass = true;
  for (const auto& b : rep.bounds) rep.pass = rep.pass && b.pass;
  return rep;
}

RateConstants rate_constants(double alpha, const CurvatureConstants& c, double /*delta*/,
                             double Delta, double lambda, double Lambda, double eps,
                             double F0_gap) {
  require(alpha > 0.0 && c.m > 0.0, "rate constants: alpha and m must be positive");
  require(eps >= 0.0 && eps <= 1.0, "rate constants: eps must lie in [0,1]");
  require(F0_gap >= 0.0, "rate constants: initial gap must be nonnegative");
  RateConstants rc;
  rc.eps = eps;
  const double denomD = 2.0 * (1.0 - Delta) + alpha * c.m;
  rc.zeta = (2.0 - eps) * eps * alpha * c.m * lambda -
            alpha * std::pow(eps, 3) * c.L * std::pow(Lambda, 3) * std::sqrt(F0_gap) /
                (6.0 * std::pow(lambda, 1.5));
  rc.gamma1 = std::sqrt(alpha * eps * c.L * Lambda) * std::pow(F0_gap, 0.25) /
              (std::pow(lambda, 0.75) * denomD);
  rc.gamma2 = alpha * c.L * Lambda * Lambda / (2.0 * lambda * std::sqrt(denomD));
  rc.stepsize_rule_satisfied = rc.zeta > 0.0 && rc.zeta < 1.0;
  return rc;
}

EnvelopeCheck check_linear_envelope(const std::vector<double>& F_gap, double zeta) {
  require(zeta > 0.0 && zeta < 1.0, "stepsize rule violated: zeta outside (0,1)");
  require(F_gap.size() >= 2, "envelope check: need at least two iterations");
  EnvelopeCheck out;
  out.pass = true;
  double factor = 1.0;
  for (std::size_t t = 1; t < F_gap.size(); ++t) {
    factor *= 1.0 - zeta;
    const double allowed = factor * F_gap[0];
    const double ratio = allowed > 0.0 ? F_gap[t] / allowed : (F_gap[t] <= 0.0 ? 0.0 : 1e300);
    if (ratio > out.worst_ratio) {
      out.worst_ratio = ratio;
      out.worst_t = static_cast<int>(t);
    }
    if (F_gap[t] > allowed * (1.0 + 1e-9)) out.pass = false;
  }
  return out;
}

RecursionReport check_gradient_recursion(const std::vector<double>& wgn_prev,
                                         const RateConstants& rc, double rho, int K) {
  require(rc.zeta < 1.0, "stepsize rule violated: zeta must be below 1");
  require(rho > 0.0 && rho < 1.0, "recursion check: rho must lie in (0,1)");
  require(K >= 0, "recursion check: K must be nonnegative");
  RecursionReport rep;
  if (rc.gamma2 == 0.0) {
    rep.quadratic_phase_vacuous = true;
    rep.note = "quadratic phase vacuous (L = 0); the fixed-ratio contraction applies instead";
  }
  const double base = 1.0 - rc.eps + rc.eps * std::pow(rho, K + 1);
  const int T = static_cast<int>(wgn_prev.size());
  for (int t = 1; t + 1 < T; ++t) {
    RecursionReport::Row row;
    row.t = t;
    row.v = wgn_prev[t];
    row.v_next = wgn_prev[t + 1];
    row.eta = base * (1.0 + rc.gamma1 * std::pow(1.0 - rc.zeta, (t - 1) / 4.0));
    if (row.eta < 1.0 && rep.t0 < 0) rep.t0 = t;
    const double quad_coeff = rc.eps * rc.eps * rc.gamma2;
    row.rhs = row.eta * row.v + quad_coeff * row.v * row.v;
    row.recursion_ok = row.v_next <= row.rhs * (1.0 + 1e-9) + 1e-15;
    rep.all_recursion_ok = rep.all_recursion_ok && row.recursion_ok;
    if (row.eta < 1.0 && quad_coeff > 0.0) {
      const double sq = std::sqrt(row.eta);
      row.interval_lo = sq * (1.0 - sq) / quad_coeff;
      row.interval_hi = (1.0 - sq) / quad_coeff;
      if (row.v >= row.interval_lo && row.v < row.interval_hi) {
        row.flagged = true;
        ++rep.num_flagged;
        row.rhs_quad = quad_coeff / (1.0 - sq) * row.v * row.v;
        row.quad_ok = row.v_next <= row.rhs_quad * (1.0 + 1e-9) + 1e-15;
        rep.all_quad_ok = rep.all_quad_ok && row.quad_ok;
      }
    }
    rep.rows.push_back(row);
  }
  return rep;
}

AlphaGapStudy alpha_gap_study(const Topology& top, const WeightMatrix& w,
                              const std::vector<LocalObjective>& locals,
                              std::vector<double> alpha_grid, double tol) {
  require(!alpha_grid.empty(), "alpha grid must be nonempty");
  for (double a : alpha_grid) require(a > 0.0, "alpha must be positive");
  std::sort(alpha_grid.begin(), alpha_grid.end(), std::greater<double>());

  AlphaGapStudy study;
  study.rho_w = check_weight_bounds(top, w).rho_w;
  const Vec x_tilde = consensus_minimizer(locals, tol);
  const int p = locals[0].dim();
  Vec stacked(top.n * p);
  for (int i = 0; i < top.n; ++i) stacked.segment(i * p, p) = x_tilde;

  for (double a : alpha_grid) {
    const PenaltyObjective P = make_penalty(top, w, locals, a);
    const CentralizedReference ref = centralized_reference(P, tol);
    AlphaGapRow row;
    row.alpha = a;
    row.gap = (ref.y_star - stacked).norm();
    row.ratio = row.gap * (1.0 - study.rho_w) / a;
    study.rows.push_back(row);
  }

  const std::size_t half = (study.rows.size() + 1) / 2;
  double lo = 1e300, hi = 0.0;
  for (std::size_t k = study.rows.size() - half; k < study.rows.size(); ++k) {
    lo = std::min(lo, study.rows[k].ratio);
    hi = std::max(hi, study.rows[k].ratio);
  }
  study.spread_smaller_half = lo > 0.0 ? hi / lo : (hi == 0.0 ? 1.0 : 1e300);
  study.bounded = study.spread_smaller_half <= 10.0;
  return study;
}

}  // namespace descon::spectral
