// Copyright 2026 The Lightcone Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "lightcone/hamiltonian.hpp"

namespace lightcone {

/// Weighted coupling graph of a Hamiltonian spec.  Nodes are sites (system
/// and environment alike); the weight J_ij aggregates every multi-site term
/// covering both i and j via root-sum-square of coefficients.  Terms on three
/// or more sites are recorded as hyperedges; the adjacency matrix marks
/// J_ij > 0.
struct CouplingGraph {
  std::vector<int> node_ids;                 ///< site ids, index-aligned with matrices
  std::vector<int> system_indices;           ///< indices (not ids) of system nodes
  Eigen::MatrixXd weights;                   ///< symmetric; diagonal holds on-site strengths
  Eigen::MatrixXi adjacency;                 ///< 0/1, symmetric, zero diagonal
  std::vector<std::vector<int>> hyperedges;  ///< distinct site-index sets, size >= 2

  [[nodiscard]] int index_of(int id) const;  ///< -1 if unknown
  [[nodiscard]] int size() const { return int(node_ids.size()); }
};

/// Aggregate a spec into its coupling graph.  Off-diagonal weights take the
/// root sum of squares of every multi-site coefficient coupling a pair;
/// single-site coefficients aggregate the same way on the diagonal, which
/// feeds the walk series but never the adjacency or the metric.
[[nodiscard]] CouplingGraph build_graph(const HamiltonianSpec& spec);

/// Shortest-path metric d(i,j) over the adjacency matrix (minimum n with
/// [A^n]_ij != 0); ids as arguments; nullopt when disconnected.
[[nodiscard]] std::optional<int> graph_distance(const CouplingGraph& g, int id_a, int id_b);

/// Distance of every node from the system node set (multi-source), in node
/// index order; nullopt for unreachable nodes.
[[nodiscard]] std::vector<std::optional<int>> distances_from_system(const CouplingGraph& g);

/// Total weight of length-d walks within the node subset `ids`:
/// sum_{i,j in ids} [J^d]_ij.  d = 0 gives |ids|.
[[nodiscard]] double path_weight(const CouplingGraph& g, int d, const std::vector<int>& ids);

/// Maximal connectivity c: for pairwise graphs the maximum degree; with
/// hyperedges, the maximum over nodes of the number of (node, hyperedge)
/// incidences counted pairwise, c_i = sum_{j != i} #{hyperedges containing
/// both i and j}.
[[nodiscard]] int max_connectivity(const CouplingGraph& g);

/// Operator-style norm of the weight matrix: maximum row sum.
[[nodiscard]] double coupling_norm(const CouplingGraph& g);

/// Partial sums of the system-bath walk weight
///   sum_{n=0}^{max_order} sum_{s in S} sum_{j : d(S,j)=n} [J^n]_sj ,
/// where the n = 0 term is the zero-length walk weight |S|.  On a finite
/// graph the increments vanish once n exceeds the system eccentricity.
struct SystemBathWeight {
  double partial_sum = 0.0;
  double last_increment = 0.0;  ///< increment contributed by n = max_order
  bool diverging = false;       ///< final increments are growing
};
[[nodiscard]] SystemBathWeight system_bath_weight(const CouplingGraph& g, int max_order);

/// J -> J/r with compensating time factor r.  `below_recommended` is set when
/// r is smaller than max_connectivity * coupling_norm, the threshold at which
/// the rescaled walk series is guaranteed summable; callers should warn.
struct RescaledGraph {
  CouplingGraph graph;
  double time_factor = 1.0;
  bool below_recommended = false;
};
[[nodiscard]] RescaledGraph rescale_couplings(const CouplingGraph& g, double r);

}  // namespace lightcone
