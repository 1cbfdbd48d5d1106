#include "doctest.h"

#include <random>
#include <set>

#include "descon/rng.hpp"
#include "descon/topology.hpp"
#include "testutil.hpp"

using namespace descon;

TEST_CASE("deterministic builders produce the expected edge sets") {
  const Topology path = make_path(4);
  CHECK(path.n == 4);
  CHECK(path.num_directed_edges() == 6);
  CHECK(path.adjacent(0, 1));
  CHECK(path.adjacent(2, 3));
  CHECK_FALSE(path.adjacent(0, 2));

  const Topology star = make_star(5);
  CHECK(star.degree(0) == 4);
  for (int i = 1; i < 5; ++i) {
    CHECK(star.degree(i) == 1);
    CHECK(star.adjacent(0, i));
  }

  const Topology complete = make_complete(4);
  CHECK(complete.num_directed_edges() == 12);
  const Topology cycle = make_cycle(5);
  CHECK(cycle.num_directed_edges() == 10);
  CHECK(cycle.adjacent(0, 4));

  CHECK(is_connected(path));
  CHECK(is_connected(star));
  CHECK(is_connected(complete));
  CHECK(is_connected(cycle));
}

TEST_CASE("directed edges are lexicographically ordered") {
  const Topology t = make_complete(3);
  const std::vector<std::pair<int, int>> want = {{0, 1}, {0, 2}, {1, 0},
                                                 {1, 2}, {2, 0}, {2, 1}};
  CHECK(t.directed_edges == want);
}

TEST_CASE("bipartite detection matches the classic families") {
  CHECK(is_bipartite(make_path(6)));
  CHECK(is_bipartite(make_star(7)));
  CHECK(is_bipartite(make_cycle(6)));
  CHECK_FALSE(is_bipartite(make_cycle(5)));
  CHECK_FALSE(is_bipartite(make_complete(3)));
}

TEST_CASE("random connected graphs reproduce an independent pair-by-pair draw") {
  const int n = 10;
  const double p_c = 0.4;
  const std::uint64_t seed = 7;
  const Topology t = make_random_connected(n, p_c, seed);
  CHECK(is_connected(t));
  CHECK(t.seed == seed);

  // Replay the documented sampling scheme: one 53-bit uniform per unordered
  // pair in row-major order, retrying with seed+1, seed+2, ... until the
  // graph is connected.
  for (std::uint64_t attempt = 0; attempt < 1000; ++attempt) {
    std::mt19937_64 gen(seed + attempt);
    std::set<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
        if (u < p_c) edges.insert({i, j});
      }
    // Connectivity of the replayed edge set, checked with a simple DSU.
    std::vector<int> parent(n);
    for (int i = 0; i < n; ++i) parent[i] = i;
    const std::function<int(int)> find = [&](int x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (const auto& [i, j] : edges) parent[find(i)] = find(j);
    bool connected = true;
    for (int i = 1; i < n; ++i) connected = connected && find(i) == find(0);
    if (!connected) continue;

    std::set<std::pair<int, int>> got;
    for (const auto& [i, j] : t.directed_edges)
      if (i < j) got.insert({i, j});
    CHECK(got == edges);
    return;
  }
  FAIL("replay never produced a connected graph");
}

TEST_CASE("random graph sampling gives up after 1000 attempts when hopeless") {
  CHECK_THROWS_WITH_AS(make_random_connected(50, 1e-9, 1),
                       doctest::Contains("failed to sample a connected graph"),
                       Error);
}

TEST_CASE("serialization round trips") {
  const Topology t = make_random_connected(8, 0.5, 11);
  const Topology u = deserialize_topology(serialize(t));
  CHECK(u.n == t.n);
  CHECK(u.seed == t.seed);
  CHECK(u.directed_edges == t.directed_edges);
  CHECK(u.neighbors == t.neighbors);
}

TEST_CASE("deserialization validates its input") {
  CHECK_THROWS_AS(deserialize_topology("garbage"), Error);
  // Asymmetric edge list: (0,1) without (1,0).
  CHECK_THROWS_AS(deserialize_topology("2 1 0\n0 1\n"), Error);
}

TEST_CASE("metropolis weights on the star") {
  const int n = 5;
  const Topology t = make_star(n);
  const WeightMatrix w = metropolis_weights(t);
  for (int i = 1; i < n; ++i) {
    CHECK(w.W(0, i) == doctest::Approx(1.0 / n).epsilon(1e-15));
    CHECK(w.W(i, 0) == doctest::Approx(1.0 / n).epsilon(1e-15));
    CHECK(w.W(i, i) == doctest::Approx(1.0 - 1.0 / n).epsilon(1e-15));
  }
  CHECK(w.W(0, 0) == doctest::Approx(1.0 - 4.0 / n).epsilon(1e-15));
  for (int i = 0; i < n; ++i) CHECK(w.W.row(i).sum() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(w.delta == doctest::Approx(0.2));
  CHECK(w.Delta == doctest::Approx(0.8));
}

TEST_CASE("metropolis weights satisfy the mixing assumptions on random graphs") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Topology t = make_random_connected(3 + static_cast<int>(seed % 8), 0.5, seed);
    const WeightMatrix w = metropolis_weights(t);
    const WeightBounds b = check_weight_bounds(t, w);
    CHECK(b.delta > 0.0);
    CHECK(b.Delta < 1.0);
    CHECK(b.rho_w < 1.0);
    CHECK((w.W - w.W.transpose()).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("custom weights are validated against the topology") {
  const Topology t = make_path(2);
  Mat good(2, 2);
  good << 0.5, 0.5, 0.5, 0.5;
  CHECK_NOTHROW(custom_weights(t, good));

  Mat asym = good;
  asym(0, 1) = 0.6;
  asym(0, 0) = 0.4;
  CHECK_THROWS_AS(custom_weights(t, asym), Error);

  Mat badsum = good * 1.1;
  CHECK_THROWS_AS(custom_weights(t, badsum), Error);

  Mat neg(2, 2);
  neg << 1.5, -0.5, -0.5, 1.5;
  CHECK_THROWS_AS(custom_weights(t, neg), Error);

  const Topology p3 = make_path(3);
  Mat offpattern = Mat::Zero(3, 3);
  offpattern << 0.5, 0.0, 0.5, 0.0, 1.0, 0.0, 0.5, 0.0, 0.5;
  CHECK_THROWS_AS(custom_weights(p3, offpattern), Error);
}

TEST_CASE("weight bound checker names the violated assumption") {
  const Topology t = make_path(2);
  Mat identity = Mat::Identity(2, 2);
  const WeightMatrix w = custom_weights(t, identity);
  CHECK_THROWS_WITH_AS(check_weight_bounds(t, w),
                       doctest::Contains("weight bound violated"), Error);
}

TEST_CASE("incidence matrices of the triangle have the known spectra") {
  const Topology t = make_complete(3);
  const IncidenceSet inc = build_incidence(t, 1);

  Eigen::SelfAdjointEigenSolver<Mat> lo(inc.L_o), lu(inc.L_u);
  const Vec lo_eigs = lo.eigenvalues();
  const Vec lu_eigs = lu.eigenvalues();
  CHECK(lo_eigs[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(lo_eigs[1] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(lo_eigs[2] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(lu_eigs[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(lu_eigs[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(lu_eigs[2] == doctest::Approx(4.0).epsilon(1e-12));

  CHECK(inc.gamma_u == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(inc.Gamma_u == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-12));
  CHECK(inc.gamma_o == doctest::Approx(std::sqrt(6.0)).epsilon(1e-12));

  // Structural identities used throughout the multiplier family.
  CHECK((inc.L_o - 0.5 * inc.E_o.transpose() * inc.E_o).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((inc.L_u - 0.5 * inc.E_u.transpose() * inc.E_u).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((inc.D_deg - 0.5 * (inc.L_u + inc.L_o)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("gamma_u vanishes exactly on bipartite graphs") {
  CHECK(build_incidence(make_path(2), 1).gamma_u == 0.0);
  CHECK(build_incidence(make_cycle(6), 2).gamma_u == 0.0);
  CHECK(build_incidence(make_cycle(5), 1).gamma_u > 0.1);
  for (std::uint64_t seed = 100; seed < 110; ++seed) {
    const Topology t = make_random_connected(6, 0.5, seed);
    const IncidenceSet inc = build_incidence(t, 2);
    if (is_bipartite(t))
      CHECK(inc.gamma_u == 0.0);
    else
      CHECK(inc.gamma_u > 0.0);
  }
}

TEST_CASE("block structure of the incidence set scales with p") {
  const Topology t = make_path(3);
  const IncidenceSet inc = build_incidence(t, 2);
  CHECK(inc.A_s.rows() == t.num_directed_edges() * 2);
  CHECK(inc.A_s.cols() == t.n * 2);
  // Row block of edge (0,1): source selector hits node 0, destination node 1.
  CHECK(inc.A_s.block(0, 0, 2, 2) == Mat::Identity(2, 2));
  CHECK(inc.A_d.block(0, 2, 2, 2) == Mat::Identity(2, 2));
}

TEST_CASE("uniform rng draws match the documented construction") {
  Rng rng(42);
  std::mt19937_64 gen(42);
  for (int i = 0; i < 10; ++i) {
    const double expected = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    CHECK(rng.uniform() == expected);
  }
}
