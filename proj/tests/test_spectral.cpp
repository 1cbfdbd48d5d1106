#include "doctest.h"

#include <cmath>
#include <vector>

#include "descon/netnewton.hpp"
#include "descon/rng.hpp"
#include "descon/spectral.hpp"
#include "testutil.hpp"

using namespace descon;
using testutil::make_fixture2;

namespace {

// Curvature of the two-node fixture (unit quadratics): m = M = 1, L = 0.
CurvatureConstants unit_quadratic_curvature() {
  CurvatureConstants c;
  c.m = 1.0;
  c.M = 1.0;
  c.L = 0.0;
  return c;
}

}  // namespace

TEST_CASE("series envelope closed forms") {
  // alpha = 2, m = 3, M = 4, delta = 0.25, Delta = 0.5, K = 1.
  const auto e = spectral::series_envelope(2.0, 3.0, 4.0, 0.25, 0.5, 1);
  CHECK(e.rho == doctest::Approx(1.5 / 7.5).epsilon(1e-15));          // 0.2
  CHECK(e.rho_alt == doctest::Approx(1.5 / 3.5).epsilon(1e-15));      // 3/7
  CHECK(e.rho_pow == doctest::Approx(0.04).epsilon(1e-14));
  CHECK(e.lambda == doctest::Approx(1.0 / 9.5).epsilon(1e-15));
  CHECK(e.Lambda == doctest::Approx(0.96 / 5.6).epsilon(1e-14));

  // The two ratio forms differ whenever m != 1; only the first feeds bounds.
  CHECK(e.rho != doctest::Approx(e.rho_alt).epsilon(1e-6));

  CHECK_THROWS_AS(spectral::series_envelope(0.0, 1.0, 1.0, 0.5, 0.5, 0), Error);
  CHECK_THROWS_AS(spectral::series_envelope(1.0, 1.0, 1.0, 0.0, 0.5, 0), Error);
  CHECK_THROWS_AS(spectral::series_envelope(1.0, 1.0, 1.0, 0.5, 1.0, 0), Error);
  CHECK_THROWS_AS(spectral::series_envelope(1.0, 1.0, 1.0, 0.5, 0.5, -1), Error);
  CHECK_THROWS_AS(spectral::series_envelope(1.0, 2.0, 1.0, 0.5, 0.5, 0), Error);
}

TEST_CASE("two-node certification with a single series term") {
  const auto fx = make_fixture2(1.0);
  const auto rep = spectral::certify_splitting(fx.P, Vec::Zero(2), 0);

  CHECK(rep.K == 0);
  CHECK(rep.m == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(rep.M == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(rep.delta == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(rep.Delta == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(rep.rho == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(rep.rho_pow == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(rep.lambda == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(rep.Lambda == doctest::Approx(0.5).epsilon(1e-15));
  REQUIRE(rep.bounds.size() == 6);
  CHECK(rep.pass);

  // H = [[1.5,-0.5],[-0.5,1.5]] has eigenvalues {1, 2}; the certified window
  // [alpha m, 2(1-delta) + alpha M] = [1, 2] is attained at both ends.
  const auto* h = rep.find("hessian");
  REQUIRE(h != nullptr);
  CHECK(h->lo == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(h->hi == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(h->measured_min == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(h->measured_max == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(h->pass);

  // D = 2 I exactly; the window degenerates to the point {2}.
  const auto* d = rep.find("splitting_diagonal");
  REQUIRE(d != nullptr);
  CHECK(d->lo == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(d->hi == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(d->measured_min == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(d->measured_max == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(d->pass);

  // B has eigenvalues {0, 1} against the window [0, 2(1-delta)] = [0, 1].
  const auto* b = rep.find("splitting_offdiagonal");
  REQUIRE(b != nullptr);
  CHECK(b->hi == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(b->measured_min == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(b->measured_max == doctest::Approx(1.0).epsilon(1e-12));

  // S = D^{-1/2} B D^{-1/2} has eigenvalues {0, 0.5}: the contraction ratio
  // rho = 0.5 is attained exactly.
  const auto* s = rep.find("normalized_offdiagonal");
  REQUIRE(s != nullptr);
  CHECK(s->hi == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(s->measured_min == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(s->measured_max == doctest::Approx(0.5).epsilon(1e-12));

  // E = I - D^{-1/2} H D^{-1/2} = [[0.25,0.25],[0.25,0.25]] with eigenvalues
  // {0, 0.5}; the series bound rho^{K+1} = 0.5 is attained.
  const auto* e = rep.find("series_error");
  REQUIRE(e != nullptr);
  CHECK(e->hi == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(e->measured_min == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(e->measured_max == doctest::Approx(0.5).epsilon(1e-12));

  // Hhat^{-1} = D^{-1} = 0.5 I sits at the coincident closed-form window.
  const auto* inv = rep.find("approximate_inverse");
  REQUIRE(inv != nullptr);
  CHECK(inv->lo == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(inv->hi == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(inv->measured_min == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(inv->measured_max == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("two-node certification with two series terms") {
  const auto fx = make_fixture2(1.0);
  const auto rep = spectral::certify_splitting(fx.P, Vec::Zero(2), 1);

  CHECK(rep.rho == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(rep.rho_pow == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(rep.lambda == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(rep.Lambda == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(rep.pass);

  // Hhat^{-1} = (I + S) D^{-1} has eigenvalues exactly {0.5, 0.75}: both
  // closed-form envelope ends are attained simultaneously.
  const auto* inv = rep.find("approximate_inverse");
  REQUIRE(inv != nullptr);
  CHECK(inv->measured_min == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(inv->measured_max == doctest::Approx(0.75).epsilon(1e-12));

  // The error spectrum tightens to {0, 0.25} = {0, rho^2}.
  const auto* e = rep.find("series_error");
  REQUIRE(e != nullptr);
  CHECK(e->hi == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(e->measured_min == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(e->measured_max == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("ten series terms push the error below a thousandth") {
  const auto fx = make_fixture2(1.0);
  const auto rep = spectral::certify_splitting(fx.P, Vec::Zero(2), 9);
  const auto* e = rep.find("series_error");
  REQUIRE(e != nullptr);
  CHECK(e->hi == doctest::Approx(std::pow(0.5, 10)).epsilon(1e-14));  // 9.77e-4
  CHECK(e->hi < 1e-3);
  CHECK(e->measured_max == doctest::Approx(9.765625e-4).epsilon(1e-8));
  CHECK(e->pass);
  CHECK(rep.pass);
}

TEST_CASE("contraction ratio uses the curvature lower bound") {
  // Stiffen the locals to m = 3: the primary ratio divides by alpha * m while
  // the reported alternative divides by alpha alone, so they separate.
  const Topology top = make_path(2);
  const Mat Wm = (Mat(2, 2) << 0.5, 0.5, 0.5, 0.5).finished();
  const WeightMatrix w = custom_weights(top, Wm);
  std::vector<LocalObjective> locals;
  const Mat A3 = 3.0 * Mat::Identity(1, 1);
  locals.push_back(LocalObjective::quadratic_centered(A3, Vec::Zero(1)));
  locals.push_back(LocalObjective::quadratic_centered(A3, 2.0 * Vec::Ones(1)));
  const PenaltyObjective P = make_penalty(top, w, locals, 1.0);

  const auto rep = spectral::certify_splitting(P, Vec::Zero(2), 0);
  CHECK(rep.rho == doctest::Approx(0.25).epsilon(1e-15));      // 1/(1+3)
  CHECK(rep.rho_alt == doctest::Approx(0.5).epsilon(1e-15));   // 1/(1+1)
  const auto* s = rep.find("normalized_offdiagonal");
  REQUIRE(s != nullptr);
  CHECK(s->hi == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(s->measured_max == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(rep.pass);
}

TEST_CASE("error extremes shrink as the series lengthens") {
  Rng rng(77);
  for (int trial = 0; trial < 8; ++trial) {
    const int n = 3 + trial % 5;
    const int p = 1 + trial % 3;
    const Topology top = make_random_connected(n, 0.6, 900 + trial);
    const WeightMatrix w = metropolis_weights(top);
    const auto locals = synth_quadratics(n, p, 50.0, 1700 + trial);
    const double alpha = (trial % 2 == 0) ? 0.5 : 2.0;
    const PenaltyObjective P = make_penalty(top, w, locals, alpha);
    Vec y(n * p);
    for (int k = 0; k < y.size(); ++k) y[k] = rng.normal();

    double prev_max = 2.0;
    for (int K : {0, 1, 2, 4}) {
      const auto rep = spectral::certify_splitting(P, y, K);
      CHECK(rep.pass);
      const auto* e = rep.find("series_error");
      REQUIRE(e != nullptr);
      CHECK(e->measured_max <= e->hi + e->slack);
      CHECK(e->measured_min >= -e->slack);
      CHECK(e->measured_max <= prev_max + 1e-12);
      prev_max = e->measured_max;
    }
  }
}

TEST_CASE("certification refuses oversized dense instances") {
  const Topology top = make_path(2);
  const WeightMatrix w = metropolis_weights(top);
  std::vector<LocalObjective> locals;
  const int p = 251;  // np = 502 crosses the dense-assembly ceiling
  locals.push_back(LocalObjective::quadratic_centered(Mat::Identity(p, p), Vec::Zero(p)));
  locals.push_back(LocalObjective::quadratic_centered(Mat::Identity(p, p), Vec::Ones(p)));
  const PenaltyObjective P = make_penalty(top, w, locals, 1.0);
  CHECK_THROWS_WITH_AS(
      spectral::certify_splitting(P, Vec::Zero(2 * p), 0),
      "certify: problem dimension np > 500; certify a sampled sub-instance instead", Error);
}

TEST_CASE("certification is bit-for-bit deterministic") {
  const Topology top = make_random_connected(7, 0.5, 42);
  const WeightMatrix w = metropolis_weights(top);
  const auto locals = synth_quadratics(7, 2, 100.0, 43);
  const PenaltyObjective P = make_penalty(top, w, locals, 0.7);
  Rng rng(44);
  Vec y(14);
  for (int k = 0; k < y.size(); ++k) y[k] = rng.normal();

  const auto a = spectral::certify_splitting(P, y, 2);
  const auto b = spectral::certify_splitting(P, y, 2);
  CHECK(a.rho == b.rho);
  CHECK(a.lambda == b.lambda);
  CHECK(a.Lambda == b.Lambda);
  REQUIRE(a.bounds.size() == b.bounds.size());
  for (std::size_t k = 0; k < a.bounds.size(); ++k) {
    CHECK(a.bounds[k].name == b.bounds[k].name);
    CHECK(a.bounds[k].lo == b.bounds[k].lo);
    CHECK(a.bounds[k].hi == b.bounds[k].hi);
    CHECK(a.bounds[k].measured_min == b.bounds[k].measured_min);
    CHECK(a.bounds[k].measured_max == b.bounds[k].measured_max);
    CHECK(a.bounds[k].pass == b.bounds[k].pass);
  }
}

TEST_CASE("rate constants match hand arithmetic") {
  // Quadratic curvature, full step: zeta = (2-1)*1*1*1*0.5 = 0.5 and both
  // transient coefficients vanish.
  const auto rc = spectral::rate_constants(1.0, unit_quadratic_curvature(), 0.5, 0.5, 0.5,
                                           0.5, 1.0, 1.5);
  CHECK(rc.zeta == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(rc.gamma1 == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(rc.gamma2 == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(rc.stepsize_rule_satisfied);

  // eps = 0 is legal for the formula evaluator: every term carries a factor
  // of eps, so zeta = 0 (no progress guaranteed) and the rule is unmet.
  const auto rc0 = spectral::rate_constants(1.0, unit_quadratic_curvature(), 0.5, 0.5, 0.5,
                                            0.5, 0.0, 1.5);
  CHECK(rc0.zeta == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(rc0.gamma1 == doctest::Approx(0.0).epsilon(1e-15));
  CHECK_FALSE(rc0.stepsize_rule_satisfied);

  // Nonquadratic example: alpha = 1, m = M = 1, delta = Delta = 0.5, L = 1,
  // lambda = 0.5, Lambda = 0.75, eps = 0.5, unit initial gap. The linear term
  // is 0.375 and the cubic correction is about 0.0249.
  CurvatureConstants c1;
  c1.m = 1.0;
  c1.M = 1.0;
  c1.L = 1.0;
  const auto rc1 = spectral::rate_constants(1.0, c1, 0.5, 0.5, 0.5, 0.75, 0.5, 1.0);
  const double linear = 1.5 * 0.5 * 0.5;               // (2-eps) eps alpha m lambda
  const double cubic = 0.125 * std::pow(0.75, 3) /
                       (6.0 * std::pow(0.5, 1.5));     // eps^3 L Lambda^3 sqrt(gap) / (6 lambda^{3/2})
  CHECK(rc1.zeta == doctest::Approx(linear - cubic).epsilon(1e-14));
  CHECK(rc1.zeta == doctest::Approx(0.3501).epsilon(2e-4));
  CHECK(rc1.gamma1 > 0.0);
  CHECK(rc1.gamma2 > 0.0);
  CHECK(rc1.stepsize_rule_satisfied);

  CHECK_THROWS_AS(
      spectral::rate_constants(1.0, unit_quadratic_curvature(), 0.5, 0.5, 0.5, 0.5, 1.5, 1.0),
      Error);
  CHECK_THROWS_AS(
      spectral::rate_constants(1.0, unit_quadratic_curvature(), 0.5, 0.5, 0.5, 0.5, 1.0, -1.0),
      Error);
}

TEST_CASE("decrease factor strengthens with the penalty weight") {
  // With quadratic locals zeta(alpha) = alpha/(1 + alpha) on the fixture: the
  // envelope and rate pipeline must reproduce 1/11 and 1/2.
  const CurvatureConstants c = unit_quadratic_curvature();
  double prev = -1.0;
  for (double alpha : {0.1, 0.5, 1.0, 2.0}) {
    const auto env = spectral::series_envelope(alpha, c.m, c.M, 0.5, 0.5, 0);
    const auto rc =
        spectral::rate_constants(alpha, c, 0.5, 0.5, env.lambda, env.Lambda, 1.0, 1.5);
    CHECK(rc.zeta == doctest::Approx(alpha / (1.0 + alpha)).epsilon(1e-13));
    CHECK(rc.zeta > prev);
    prev = rc.zeta;
  }
}

TEST_CASE("linear envelope audit on the fixture trajectory") {
  const auto fx = make_fixture2(1.0);
  nn::State s = nn::make_state(fx.P, Vec::Zero(2));
  const double F_star = 0.5;
  std::vector<double> gap = {fx.P.value(s.y) - F_star};
  for (int t = 0; t < 6; ++t) {
    nn::compute_direction(s, fx.P, 0);
    nn::apply_step(s, fx.P, 1.0);
    gap.push_back(fx.P.value(s.y) - F_star);
  }
  CHECK(gap[0] == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(gap[1] == doctest::Approx(0.25).epsilon(1e-13));
  CHECK(gap[2] == doctest::Approx(0.0625).epsilon(1e-12));

  const auto chk = spectral::check_linear_envelope(gap, 0.5);
  CHECK(chk.pass);
  // The allowed envelope halves per step while the trajectory quarters after
  // the first step, so t = 1 is the tightest point at ratio 1/3.
  CHECK(chk.worst_t == 1);
  CHECK(chk.worst_ratio == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("linear envelope audit rejects violations and bad factors") {
  const std::vector<double> bad = {1.0, 0.9};
  const auto chk = spectral::check_linear_envelope(bad, 0.5);
  CHECK_FALSE(chk.pass);
  CHECK(chk.worst_t == 1);
  CHECK(chk.worst_ratio == doctest::Approx(1.8).epsilon(1e-12));

  const std::vector<double> ok = {1.0, 0.4};
  CHECK_THROWS_WITH_AS(spectral::check_linear_envelope(ok, 0.0),
                       "stepsize rule violated: zeta outside (0,1)", Error);
  CHECK_THROWS_WITH_AS(spectral::check_linear_envelope(ok, 1.0),
                       "stepsize rule violated: zeta outside (0,1)", Error);
  CHECK_THROWS_AS(spectral::check_linear_envelope({1.0}, 0.5), Error);
}

TEST_CASE("gradient recursion audit on the quadratic fixture") {
  // D = 2 I is constant for the fixture, so the previous-step weighted norm
  // is ||g_t|| / sqrt(2) for every t; the series starts sqrt(2), 0.5, 0.25.
  const auto fx = make_fixture2(1.0);
  nn::State s = nn::make_state(fx.P, Vec::Zero(2));
  std::vector<double> wgn = {s.g.norm() / std::sqrt(2.0)};
  for (int t = 0; t < 6; ++t) {
    nn::compute_direction(s, fx.P, 0);
    nn::apply_step(s, fx.P, 1.0);
    wgn.push_back(s.g.norm() / std::sqrt(2.0));
  }
  CHECK(wgn[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(wgn[1] == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(wgn[2] == doctest::Approx(0.25).epsilon(1e-13));

  const auto rc = spectral::rate_constants(1.0, unit_quadratic_curvature(), 0.5, 0.5, 0.5,
                                           0.5, 1.0, 1.5);
  const auto rep = spectral::check_gradient_recursion(wgn, rc, 0.5, 0);
  CHECK(rep.all_recursion_ok);
  CHECK(rep.all_quad_ok);
  CHECK(rep.num_flagged == 0);
  CHECK(rep.t0 == 1);
  CHECK(rep.quadratic_phase_vacuous);
  CHECK(rep.note.find("quadratic phase vacuous") != std::string::npos);
  CHECK(rep.note.find("contraction applies instead") != std::string::npos);
  REQUIRE(!rep.rows.empty());
  for (const auto& row : rep.rows) {
    // eta_t = 1 - eps + eps rho^{K+1} = 0.5 with no transient inflation.
    CHECK(row.eta == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(row.recursion_ok);
    CHECK_FALSE(row.flagged);
  }
}

TEST_CASE("recursion audit flags the quadratic window") {
  spectral::RateConstants rc;
  rc.eps = 1.0;
  rc.zeta = 0.5;
  rc.gamma1 = 0.0;
  rc.gamma2 = 1.0;
  rc.stepsize_rule_satisfied = true;
  // eta = rho^{K+1} = 0.25, sqrt(eta) = 0.5: the flagged window is
  // [0.25, 0.5) and the quadratic bound is 2 v^2.
  const std::vector<double> wgn = {9.9, 0.3, 0.15, 0.01};
  const auto rep = spectral::check_gradient_recursion(wgn, rc, 0.25, 0);
  CHECK(rep.t0 == 1);
  CHECK(rep.num_flagged == 1);
  CHECK(rep.all_recursion_ok);
  CHECK(rep.all_quad_ok);
  CHECK_FALSE(rep.quadratic_phase_vacuous);
  REQUIRE(rep.rows.size() == 2);
  const auto& row = rep.rows[0];
  CHECK(row.flagged);
  CHECK(row.interval_lo == doctest::Approx(0.25).epsilon(1e-13));
  CHECK(row.interval_hi == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(row.rhs_quad == doctest::Approx(0.18).epsilon(1e-13));
  CHECK(row.quad_ok);
  // Second row sits below the window and is not flagged.
  CHECK_FALSE(rep.rows[1].flagged);
}

TEST_CASE("recursion audit reports violations") {
  const auto rc = spectral::rate_constants(1.0, unit_quadratic_curvature(), 0.5, 0.5, 0.5,
                                           0.5, 1.0, 1.5);
  // eta = 0.5 but the norm barely decays: the per-step inequality fails.
  const std::vector<double> wgn = {9.0, 1.0, 0.9};
  const auto rep = spectral::check_gradient_recursion(wgn, rc, 0.5, 0);
  CHECK_FALSE(rep.all_recursion_ok);
  REQUIRE(rep.rows.size() == 1);
  CHECK_FALSE(rep.rows[0].recursion_ok);
}

TEST_CASE("transient amplification delays the contraction onset") {
  spectral::RateConstants rc;
  rc.eps = 0.5;
  rc.zeta = 0.1;
  rc.gamma1 = 10.0;
  rc.gamma2 = 1.0;
  rc.stepsize_rule_satisfied = true;
  // base = 0.75; eta_t = 0.75 (1 + 10 * 0.9^{(t-1)/4}) crosses 1 at t = 131.
  const std::vector<double> wgn(140, 0.0);
  const auto rep = spectral::check_gradient_recursion(wgn, rc, 0.5, 0);
  CHECK(rep.t0 == 131);
  CHECK(rep.num_flagged == 0);
  CHECK(rep.all_recursion_ok);
  for (const auto& row : rep.rows) {
    if (row.t < 131) CHECK(row.eta >= 1.0);
    if (row.t == 131) CHECK(row.eta < 1.0);
    CHECK_FALSE(row.flagged);  // v = 0 sits below every window
  }

  CHECK_THROWS_AS(spectral::check_gradient_recursion(wgn, rc, 1.5, 0), Error);
  CHECK_THROWS_AS(spectral::check_gradient_recursion(wgn, rc, 0.5, -1), Error);
}

TEST_CASE("penalty gap tracks the weight on the fixture") {
  const auto fx = make_fixture2(1.0);
  // Grid given out of order; rows come back sorted by alpha descending.
  auto study = spectral::alpha_gap_study(fx.top, fx.w, fx.locals, {0.1, 1.0});
  REQUIRE(study.rows.size() == 2);
  CHECK(study.rows[0].alpha == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(study.rows[1].alpha == doctest::Approx(0.1).epsilon(1e-15));

  // y*(1) = (0.5, 1.5) gives gap = sqrt(0.5); y*(0.1) = (10/11, 12/11) gives
  // gap = sqrt(2)/11.
  CHECK(study.rows[0].gap == doctest::Approx(0.70710678118654757).epsilon(1e-9));
  CHECK(study.rows[1].gap == doctest::Approx(0.12856486930664504).epsilon(1e-6));

  // The fixture mixing matrix has spectrum {0, 1}: rho_w = 0.
  CHECK(study.rho_w == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(study.rows[0].ratio == doctest::Approx(study.rows[0].gap).epsilon(1e-12));
  CHECK(study.bounded);
}

TEST_CASE("penalty gap shrinks monotonically toward consensus") {
  const auto fx = make_fixture2(1.0);
  const std::vector<double> grid = {1.0, 0.3, 0.1, 0.03, 0.01, 0.003};
  const auto study = spectral::alpha_gap_study(fx.top, fx.w, fx.locals, grid);
  REQUIRE(study.rows.size() == grid.size());
  for (std::size_t k = 0; k + 1 < study.rows.size(); ++k)
    CHECK(study.rows[k].gap > study.rows[k + 1].gap);
  // The gap vanishes with alpha, not just decreases.
  CHECK(study.rows.back().gap < 0.01 * study.rows.front().gap);
}

TEST_CASE("gap ratio stays within a decade across three decades") {
  const Topology top = make_path(4);
  const WeightMatrix w = metropolis_weights(top);
  const auto locals = synth_quadratics(4, 2, 20.0, 505);
  const auto study = spectral::alpha_gap_study(top, w, locals, {1e-1, 1e-2, 1e-3}, 1e-11);
  REQUIRE(study.rows.size() == 3);
  CHECK(study.rows[0].gap > study.rows[1].gap);
  CHECK(study.rows[1].gap > study.rows[2].gap);
  CHECK(study.spread_smaller_half <= 10.0);
  CHECK(study.bounded);

  CHECK_THROWS_WITH_AS(spectral::alpha_gap_study(top, w, locals, {}),
                       "alpha grid must be nonempty", Error);
  CHECK_THROWS_WITH_AS(spectral::alpha_gap_study(top, w, locals, {0.1, -1.0}),
                       "alpha must be positive", Error);
}
