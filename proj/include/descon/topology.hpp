#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "descon/common.hpp"

namespace descon {

// Undirected connected graph over nodes 0..n-1. Directed edges enumerate
// both orientations of every undirected edge in lexicographic (i, j) order;
// this ordering fixes the row layout of every edge-indexed matrix and the
// message accounting, so it must never change.
struct Topology {
  int n = 0;
  std::vector<std::vector<int>> neighbors;       // sorted per node
  std::vector<std::pair<int, int>> directed_edges;
  std::uint64_t seed = 0;                        // 0 for deterministic builders

  int num_directed_edges() const { return static_cast<int>(directed_edges.size()); }
  int degree(int i) const { return static_cast<int>(neighbors[i].size()); }
  bool adjacent(int i, int j) const;
};

Topology make_path(int n);
Topology make_star(int n);
Topology make_complete(int n);
Topology make_cycle(int n);

// Erdos-Renyi G(n, p_c) conditioned on connectivity: draws one uniform per
// unordered pair in row-major order, re-samples with seed+1, seed+2, ... and
// gives up after 1000 attempts.
Topology make_random_connected(int n, double p_c, std::uint64_t seed);

bool is_connected(const Topology& t);
bool is_bipartite(const Topology& t);

// Text round trip: "n m seed" header then one "i j" line per directed edge.
std::string serialize(const Topology& t);
Topology deserialize_topology(const std::string& text);

// Symmetric doubly stochastic mixing matrix with positive diagonal.
struct WeightMatrix {
  Mat W;
  double delta = 0.0;  // min_i w_ii
  double Delta = 0.0;  // max_i w_ii
};

// w_ij = 1 / (1 + max(d_i, d_j)) on edges, diagonal absorbs the remainder.
WeightMatrix metropolis_weights(const Topology& t);

// Arbitrary W supplied by the user; validated against the topology sparsity
// pattern, symmetry, nonnegativity and unit row sums (1e-10).
WeightMatrix custom_weights(const Topology& t, const Mat& W);

struct WeightBounds {
  double delta = 0.0;
  double Delta = 0.0;
  double rho_w = 0.0;  // second largest eigenvalue modulus
};

// Validates 0 < delta <= Delta < 1 and, for connected graphs, rho_w < 1.
// Throws descon::Error naming the violated bound otherwise.
WeightBounds check_weight_bounds(const Topology& t, const WeightMatrix& w);

// Edge-formulation matrices at block size p. Rows follow directed_edges
// order; for edge e = (i, j) the source block column is i, destination j.
struct IncidenceSet {
  int p = 1;
  Mat A_s, A_d;       // mp x np source / destination selectors
  Mat E_o, E_u;       // A_s - A_d, A_s + A_d
  Mat L_o, L_u;       // oriented / signless block Laplacians
  Mat D_deg;          // block diagonal of d_i I_p
  double gamma_u = 0; // min singular value of E_u (0 iff bipartite)
  double Gamma_u = 0; // max singular value of E_u
  double gamma_o = 0; // min nonzero singular value of E_o
};

IncidenceSet build_incidence(const Topology& t, int p);

}  // namespace descon
