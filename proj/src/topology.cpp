#include "descon/topology.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>

#include "descon/rng.hpp"

namespace descon {

namespace {

Topology finalize(int n, std::vector<std::vector<int>> nbrs, std::uint64_t seed) {
  Topology t;
  t.n = n;
  t.seed = seed;
  t.neighbors = std::move(nbrs);
  for (auto& list : t.neighbors) std::sort(list.begin(), list.end());
  for (int i = 0; i < n; ++i)
    for (int j : t.neighbors[i]) t.directed_edges.emplace_back(i, j);
  return t;
}

}  // namespace

bool Topology::adjacent(int i, int j) const {
  const auto& list = neighbors[i];
  return std::binary_search(list.begin(), list.end(), j);
}

Topology make_path(int n) {
  require(n >= 2, "path topology needs n >= 2");
  std::vector<std::vector<int>> nbrs(n);
  for (int i = 0; i + 1 < n; ++i) {
    nbrs[i].push_back(i + 1);
    nbrs[i + 1].push_back(i);
  }
  return finalize(n, std::move(nbrs), 0);
}

Topology make_star(int n) {
  require(n >= 2, "star topology needs n >= 2");
  std::vector<std::vector<int>> nbrs(n);
  for (int i = 1; i < n; ++i) {
    nbrs[0].push_back(i);
    nbrs[i].push_back(0);
  }
  return finalize(n, std::move(nbrs), 0);
}

Topology make_complete(int n) {
  require(n >= 2, "complete topology needs n >= 2");
  std::vector<std::vector<int>> nbrs(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (j != i) nbrs[i].push_back(j);
  return finalize(n, std::move(nbrs), 0);
}

Topology make_cycle(int n) {
  require(n >= 3, "cycle topology needs n >= 3");
  std::vector<std::vector<int>> nbrs(n);
  for (int i = 0; i < n; ++i) {
    nbrs[i].push_back((i + 1) % n);
    nbrs[i].push_back((i + n - 1) % n);
  }
  return finalize(n, std::move(nbrs), 0);
}

Topology make_random_connected(int n, double p_c, std::uint64_t seed) {
  require(n >= 2, "random topology needs n >= 2");
  require(p_c > 0.0 && p_c <= 1.0, "edge probability must lie in (0,1]");
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const std::uint64_t s = seed + static_cast<std::uint64_t>(attempt);
    Rng rng(s);
    std::vector<std::vector<int>> nbrs(n);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (rng.uniform() < p_c) {
          nbrs[i].push_back(j);
          nbrs[j].push_back(i);
        }
    Topology t = finalize(n, std::move(nbrs), s);
    if (is_connected(t)) return t;
  }
  std::ostringstream msg;
  msg << "failed to sample a connected graph with n = " << n << ", p_c = " << p_c
      << " after 1000 attempts";
  throw Error(msg.str());
}

bool is_connected(const Topology& t) {
  if (t.n == 0) return false;
  std::vector<char> seen(t.n, 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  int count = 1;
  while (!q.empty()) {
    const int i = q.front();
    q.pop();
    for (int j : t.neighbors[i])
      if (!seen[j]) {
        seen[j] = 1;
        ++count;
        q.push(j);
      }
  }
  return count == t.n;
}

bool is_bipartite(const Topology& t) {
  std::vector<int> color(t.n, -1);
  for (int start = 0; start < t.n; ++start) {
    if (color[start] != -1) continue;
    color[start] = 0;
    std::queue<int> q;
    q.push(start);
    while (!q.empty()) {
      const int i = q.front();
      q.pop();
      for (int j : t.neighbors[i]) {
        if (color[j] == -1) {
          color[j] = 1 - color[i];
          q.push(j);
        } else if (color[j] == color[i]) {
          return false;
        }
      }
    }
  }
  return true;
}

std::string serialize(const Topology& t) {
  std::ostringstream out;
  out << t.n << " " << t.num_directed_edges() << " " << t.seed << "\n";
  for (const auto& [i, j] : t.directed_edges) out << i << " " << j << "\n";
  return out.str();
}

Topology deserialize_topology(const std::string& text) {
  std::istringstream in(text);
  int n = 0, m = 0;
  std::uint64_t seed = 0;
  require(static_cast<bool>(in >> n >> m >> seed), "topology text: bad header");
  require(n >= 2 && m >= 0 && m % 2 == 0, "topology text: invalid n or m");
  std::vector<std::vector<int>> nbrs(n);
  for (int e = 0; e < m; ++e) {
    int i = 0, j = 0;
    require(static_cast<bool>(in >> i >> j), "topology text: truncated edge list");
    require(i >= 0 && i < n && j >= 0 && j < n && i != j, "topology text: edge out of range");
    nbrs[i].push_back(j);
  }
  Topology t = finalize(n, std::move(nbrs), seed);
  for (const auto& [i, j] : t.directed_edges)
    require(t.adjacent(j, i), "topology text: edge list not symmetric");
  return t;
}

WeightMatrix metropolis_weights(const Topology& t) {
  WeightMatrix w;
  w.W = Mat::Zero(t.n, t.n);
  for (int i = 0; i < t.n; ++i) {
    double off = 0.0;
    for (int j : t.neighbors[i]) {
      const double wij = 1.0 / (1.0 + std::max(t.degree(i), t.degree(j)));
      w.W(i, j) = wij;
      off += wij;
    }
    w.W(i, i) = 1.0 - off;
  }
  w.delta = w.W.diagonal().minCoeff();
  w.Delta = w.W.diagonal().maxCoeff();
  return w;
}

WeightMatrix custom_weights(const Topology& t, const Mat& W) {
  require(W.rows() == t.n && W.cols() == t.n, "custom weights: wrong dimensions");
  for (int i = 0; i < t.n; ++i) {
    double row = 0.0;
    for (int j = 0; j < t.n; ++j) {
      const double wij = W(i, j);
      require(wij >= 0.0, "custom weights: negative entry");
      require(std::abs(wij - W(j, i)) <= 1e-12, "custom weights: not symmetric");
      if (i != j && wij != 0.0)
        require(t.adjacent(i, j), "custom weights: nonzero entry off the edge set");
      row += wij;
    }
    require(std::abs(row - 1.0) <= 1e-10, "custom weights: row sum deviates from 1");
  }
  WeightMatrix w;
  w.W = W;
  w.delta = W.diagonal().minCoeff();
  w.Delta = W.diagonal().maxCoeff();
  return w;
}

WeightBounds check_weight_bounds(const Topology& t, const WeightMatrix& w) {
  for (int i = 0; i < t.n; ++i) {
    const double row = w.W.row(i).sum();
    require(std::abs(row - 1.0) <= 1e-10, "invalid weights: row sum deviates from 1");
  }
  WeightBounds b;
  b.delta = w.W.diagonal().minCoeff();
  b.Delta = w.W.diagonal().maxCoeff();
  require(b.delta > 0.0, "weight bound violated: needs 0 < delta <= w_ii");
  require(b.Delta < 1.0, "weight bound violated: needs w_ii <= Delta < 1");
  Eigen::SelfAdjointEigenSolver<Mat> es(w.W);
  require(es.info() == Eigen::Success, "weight eigendecomposition failed");
  const Vec evs = es.eigenvalues();  // ascending
  double second = std::abs(evs(0));
  for (int k = 0; k + 1 < t.n; ++k) second = std::max(second, std::abs(evs(k)));
  b.rho_w = t.n == 1 ? 0.0 : second;
  if (is_connected(t))
    require(b.rho_w < 1.0, "weight bound violated: rho_w must be < 1 on a connected graph");
  return b;
}

IncidenceSet build_incidence(const Topology& t, int p) {
  require(p >= 1, "block size p must be positive");
  IncidenceSet inc;
  inc.p = p;
  const int m = t.num_directed_edges();
  const int np = t.n * p, mp = m * p;
  inc.A_s = Mat::Zero(mp, np);
  inc.A_d = Mat::Zero(mp, np);
  const Mat I = Mat::Identity(p, p);
  for (int e = 0; e < m; ++e) {
    const auto [i, j] = t.directed_edges[e];
    inc.A_s.block(e * p, i * p, p, p) = I;
    inc.A_d.block(e * p, j * p, p, p) = I;
  }
  inc.E_o = inc.A_s - inc.A_d;
  inc.E_u = inc.A_s + inc.A_d;
  inc.L_o = 0.5 * inc.E_o.transpose() * inc.E_o;
  inc.L_u = 0.5 * inc.E_u.transpose() * inc.E_u;
  inc.D_deg = 0.5 * (inc.L_u + inc.L_o);

  Eigen::JacobiSVD<Mat> svd_u(inc.E_u);
  const Vec su = svd_u.singularValues();
  inc.Gamma_u = su.size() ? su(0) : 0.0;
  inc.gamma_u = su.size() ? su(su.size() - 1) : 0.0;
  // Bipartiteness decides singularity exactly; the SVD value near zero is
  // noise in that case.
  if (is_bipartite(t)) inc.gamma_u = 0.0;

  Eigen::JacobiSVD<Mat> svd_o(inc.E_o);
  const Vec so = svd_o.singularValues();
  const double cutoff = 1e-9 * (so.size() ? so(0) : 0.0);
  double smallest = 0.0;
  for (int k = 0; k < so.size(); ++k)
    if (so(k) > cutoff) smallest = so(k);
  inc.gamma_o = smallest;
  return inc;
}

}  // namespace descon
