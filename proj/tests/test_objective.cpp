#include "doctest.h"

#include <cmath>

#include "descon/objective.hpp"
#include "descon/rng.hpp"
#include "testutil.hpp"

using namespace descon;

TEST_CASE("scalar quadratic evaluates with its completing constant") {
  Mat A(1, 1);
  A << 1.0;
  Vec b(1);
  b << -2.0;
  const LocalObjective f = LocalObjective::quadratic(A, b);
  Vec x0(1);
  x0 << 0.0;
  CHECK(f.value(x0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(f.gradient(x0)[0] == doctest::Approx(-2.0).epsilon(1e-15));
  CHECK(f.hessian(x0)(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  // Minimum value is exactly zero at x = -A^{-1} b = 2.
  Vec xstar(1);
  xstar << 2.0;
  CHECK(f.value(xstar) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("quadratic factory validates its matrix") {
  Mat asym(2, 2);
  asym << 1.0, 0.5, 0.0, 1.0;
  CHECK_THROWS_AS(LocalObjective::quadratic(asym, Vec::Zero(2)), Error);
  Mat indef(2, 2);
  indef << 1.0, 0.0, 0.0, -1.0;
  CHECK_THROWS_AS(LocalObjective::quadratic(indef, Vec::Zero(2)), Error);
}

TEST_CASE("single-sample logistic loss has the textbook values at zero") {
  Mat s(1, 1);
  s << 1.0;
  const LocalObjective f = LocalObjective::logistic(s, {1}, 0.0);
  Vec x0(1);
  x0 << 0.0;
  CHECK(f.value(x0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(f.gradient(x0)[0] == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(f.hessian(x0)(0, 0) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("logistic curvature constants are the certified closed forms") {
  Mat s(1, 1);
  s << 1.0;
  const LocalObjective f = LocalObjective::logistic(s, {1}, 0.1);
  const CurvatureConstants c = f.curvature();
  CHECK(c.m == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(c.M == doctest::Approx(0.35).epsilon(1e-15));
  CHECK(c.L == doctest::Approx(1.0 / (6.0 * std::sqrt(3.0))).epsilon(1e-12));
  CHECK_FALSE(c.approximate);
}

TEST_CASE("unregularized logistic curvature is refused with a clear message") {
  Mat s(1, 1);
  s << 1.0;
  const LocalObjective f = LocalObjective::logistic(s, {1}, 0.0);
  CHECK_THROWS_WITH_AS(f.curvature(), doctest::Contains("not strongly convex"), Error);
  // The sublevel-set estimate remains available and is flagged.
  Vec x0 = Vec::Zero(1);
  const CurvatureConstants est = f.curvature_estimated(x0);
  CHECK(est.approximate);
  CHECK(est.M >= est.m);
}

TEST_CASE("logistic evaluation is stable for extreme margins") {
  Mat s(1, 1);
  s << 1.0;
  const LocalObjective f = LocalObjective::logistic(s, {1}, 0.0);
  Vec far(1);
  far << 800.0;
  CHECK(f.value(far) == doctest::Approx(0.0));
  CHECK(std::isfinite(f.gradient(far)[0]));
  far << -800.0;
  CHECK(f.value(far) == doctest::Approx(800.0).epsilon(1e-12));
  CHECK(f.gradient(far)[0] == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("gradients and hessians match central differences at random points") {
  auto quads = synth_quadratics(3, 3, 50.0, 21);
  auto logs = synth_logistics(3, 3, 4, 0.05, 1.0, 0.1, 22);
  std::vector<LocalObjective> all;
  for (auto& f : quads) all.push_back(f);
  for (auto& f : logs) all.push_back(f);

  Rng rng(99);
  int points = 0;
  for (const auto& f : all) {
    for (int trial = 0; trial < 17; ++trial) {
      Vec x(f.dim());
      for (int i = 0; i < x.size(); ++i) x[i] = 2.0 * rng.normal();
      const Vec g_fd = testutil::fd_gradient([&](const Vec& v) { return f.value(v); }, x);
      const Mat H_fd = testutil::fd_hessian([&](const Vec& v) { return f.gradient(v); }, x);
      CHECK((f.gradient(x) - g_fd).norm() < 1e-6 * (1.0 + g_fd.norm()));
      CHECK((f.hessian(x) - H_fd).norm() < 1e-6 * (1.0 + H_fd.norm()));
      ++points;
    }
  }
  CHECK(points >= 100);
}

TEST_CASE("certified curvature bounds hold at random points") {
  auto locals = synth_logistics(4, 3, 5, 0.2, 1.0, 0.0, 31);
  Rng rng(7);
  for (const auto& f : locals) {
    const CurvatureConstants c = f.curvature();
    for (int trial = 0; trial < 10; ++trial) {
      Vec x(f.dim()), y(f.dim());
      for (int i = 0; i < x.size(); ++i) {
        x[i] = 3.0 * rng.normal();
        y[i] = 3.0 * rng.normal();
      }
      Eigen::SelfAdjointEigenSolver<Mat> es(f.hessian(x));
      CHECK(es.eigenvalues().minCoeff() >= c.m - 1e-12);
      CHECK(es.eigenvalues().maxCoeff() <= c.M + 1e-12);
      // Hessian Lipschitz continuity in the spectral norm.
      const Mat diff = f.hessian(x) - f.hessian(y);
      Eigen::SelfAdjointEigenSolver<Mat> ed(diff);
      const double spec = ed.eigenvalues().cwiseAbs().maxCoeff();
      CHECK(spec <= c.L * (x - y).norm() + 1e-12);
    }
  }
}

TEST_CASE("aggregate curvature takes the worst case across nodes") {
  auto locals = synth_quadratics(5, 2, 100.0, 5);
  const CurvatureConstants agg = aggregate_curvature(locals);
  double mn = 1e300, mx = 0.0;
  for (const auto& f : locals) {
    const CurvatureConstants c = f.curvature();
    mn = std::min(mn, c.m);
    mx = std::max(mx, c.M);
    CHECK(c.L == 0.0);
  }
  CHECK(agg.m == doctest::Approx(mn));
  CHECK(agg.M == doctest::Approx(mx));
  CHECK(agg.L == 0.0);
}

TEST_CASE("synthetic quadratics respect the condition number cap") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto locals = synth_quadratics(4, 3, 1000.0, seed);
    for (const auto& f : locals) {
      Eigen::SelfAdjointEigenSolver<Mat> es(f.quad_A());
      CHECK(es.eigenvalues().minCoeff() >= 1.0 - 1e-9);
      CHECK(es.eigenvalues().maxCoeff() <= 1000.0 + 1e-6);
    }
  }
  // Determinism in the seed.
  auto a = synth_quadratics(3, 2, 10.0, 77);
  auto b = synth_quadratics(3, 2, 10.0, 77);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK((a[i].quad_A() - b[i].quad_A()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a[i].quad_b() - b[i].quad_b()).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("synthetic logistic instances carry valid labels and are deterministic") {
  auto a = synth_logistics(4, 3, 6, 1e-3, 1.0, 0.2, 13);
  auto b = synth_logistics(4, 3, 6, 1e-3, 1.0, 0.2, 13);
  REQUIRE(a.size() == 4);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].samples().rows() == 6);
    CHECK(a[i].samples().cols() == 3);
    for (int l : a[i].labels()) CHECK((l == 1 || l == -1));
    CHECK((a[i].samples() - b[i].samples()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a[i].labels() == b[i].labels());
  }
}

TEST_CASE("dataset csv round trips and rejects malformed input") {
  const std::string dir = testutil::make_temp_dir();
  const std::string path = dir + "/data.csv";
  testutil::write_file(path,
                       "label,feature_1,feature_2\n"
                       "1,0.5,-1.25\n"
                       "-1,2.0,0.125\n");
  const Dataset d = load_dataset_csv(path);
  REQUIRE(d.labels.size() == 2);
  CHECK(d.labels[0] == 1);
  CHECK(d.labels[1] == -1);
  CHECK(d.samples(0, 0) == 0.5);
  CHECK(d.samples(1, 1) == 0.125);

  testutil::write_file(path, "wrong,header\n1,2\n");
  CHECK_THROWS_AS(load_dataset_csv(path), Error);
  testutil::write_file(path, "label,feature_1\n2,0.5\n");
  CHECK_THROWS_AS(load_dataset_csv(path), Error);  // label must be +-1
  testutil::write_file(path, "label,feature_1\n1\n");
  CHECK_THROWS_AS(load_dataset_csv(path), Error);  // missing cell
}
