// Copyright 2026 The Lightcone Authors
// SPDX-License-Identifier: Apache-2.0
#include "lightcone/coupling_graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

#include "lightcone/errors.hpp"

namespace lightcone {

int CouplingGraph::index_of(int id) const {
  for (std::size_t k = 0; k < node_ids.size(); ++k)
    if (node_ids[k] == id) return int(k);
  return -1;
}

CouplingGraph build_graph(const HamiltonianSpec& spec) {
  validate_spec(spec);
  CouplingGraph g;
  g.node_ids.reserve(spec.sites.size());
  for (const auto& s : spec.sites) g.node_ids.push_back(s.id);
  for (std::size_t k = 0; k < spec.sites.size(); ++k)
    if (spec.sites[k].kind == SiteKind::System) g.system_indices.push_back(int(k));
  const int n = g.size();
  Eigen::MatrixXd sq = Eigen::MatrixXd::Zero(n, n);
  std::set<std::vector<int>> edge_sets;
  for (const auto& term : spec.terms) {
    std::vector<int> idx;
    idx.reserve(term.sites.size());
    for (int id : term.sites) idx.push_back(g.index_of(id));
    const double c2 = term.coeff * term.coeff;
    if (idx.size() < 2) {
      // Single-site strengths aggregate on the diagonal.  They do not create
      // edges (the metric ignores them), but the walk series counts them as
      // pause steps, which keeps the remainder bound honest when on-site
      // terms are strong.
      if (idx.size() == 1) sq(idx[0], idx[0]) += c2;
      continue;
    }
    for (std::size_t a = 0; a < idx.size(); ++a)
      for (std::size_t b = a + 1; b < idx.size(); ++b) {
        sq(idx[a], idx[b]) += c2;
        sq(idx[b], idx[a]) += c2;
      }
    std::sort(idx.begin(), idx.end());
    edge_sets.insert(idx);
  }
  g.weights = sq.array().sqrt().matrix();
  g.adjacency = Eigen::MatrixXi::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && g.weights(i, j) > 0.0) g.adjacency(i, j) = 1;
  g.hyperedges.assign(edge_sets.begin(), edge_sets.end());
  return g;
}

namespace {

// Multi-source BFS over the adjacency matrix; -1 marks unreachable.
std::vector<int> bfs(const CouplingGraph& g, const std::vector<int>& sources) {
  std::vector<int> dist(g.size(), -1);
  std::deque<int> queue;
  for (int s : sources) {
    if (s < 0 || s >= g.size()) throw ValidationError("bfs: node index out of range");
    if (dist[s] != 0) {
      dist[s] = 0;
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    for (int v = 0; v < g.size(); ++v)
      if (g.adjacency(u, v) != 0 && dist[v] < 0) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
  }
  return dist;
}

// Increments inc[d] = sum_{s in S} sum_{j : d(S,j)=d} [J^d]_sj for d = 0..max_order.
std::vector<double> system_walk_increments(const CouplingGraph& g, int max_order) {
  if (max_order < 0) throw ValidationError("max_order must be nonnegative");
  const std::vector<int> dist = bfs(g, g.system_indices);
  std::vector<double> inc(std::size_t(max_order) + 1, 0.0);
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(g.size(), g.size());
  for (int d = 0; d <= max_order; ++d) {
    if (d > 0) power = (power * g.weights).eval();
    double sum = 0.0;
    for (int s : g.system_indices)
      for (int j = 0; j < g.size(); ++j)
        if (dist[j] == d) sum += power(s, j);
    inc[std::size_t(d)] = sum;
  }
  return inc;
}

}  // namespace

std::optional<int> graph_distance(const CouplingGraph& g, int id_a, int id_b) {
  int a = g.index_of(id_a);
  int b = g.index_of(id_b);
  if (a < 0 || b < 0) throw ValidationError("graph_distance: unknown node id");
  int d = bfs(g, {a})[b];
  if (d < 0) return std::nullopt;
  return d;
}

std::vector<std::optional<int>> distances_from_system(const CouplingGraph& g) {
  if (g.system_indices.empty()) throw ValidationError("graph has no system nodes");
  std::vector<int> dist = bfs(g, g.system_indices);
  std::vector<std::optional<int>> out(dist.size());
  for (std::size_t k = 0; k < dist.size(); ++k)
    out[k] = dist[k] < 0 ? std::nullopt : std::optional<int>(dist[k]);
  return out;
}

double path_weight(const CouplingGraph& g, int d, const std::vector<int>& ids) {
  if (d < 0) throw ValidationError("path_weight: order must be nonnegative");
  std::vector<int> idx;
  idx.reserve(ids.size());
  for (int id : ids) {
    int k = g.index_of(id);
    if (k < 0) throw ValidationError("path_weight: unknown node id " + std::to_string(id));
    idx.push_back(k);
  }
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(g.size(), g.size());
  for (int k = 0; k < d; ++k) power = (power * g.weights).eval();
  double sum = 0.0;
  for (int i : idx)
    for (int j : idx) sum += power(i, j);
  return sum;
}

int max_connectivity(const CouplingGraph& g) {
  // Pairwise incidence counts per node over distinct hyperedges; for a
  // 2-uniform graph this reduces to the node degree.
  int best = 0;
  for (int i = 0; i < g.size(); ++i) {
    int c = 0;
    for (const auto& edge : g.hyperedges) {
      if (std::find(edge.begin(), edge.end(), i) == edge.end()) continue;
      c += int(edge.size()) - 1;
    }
    best = std::max(best, c);
  }
  return best;
}

double coupling_norm(const CouplingGraph& g) {
  if (g.size() == 0) return 0.0;
  return g.weights.cwiseAbs().rowwise().sum().maxCoeff();
}

SystemBathWeight system_bath_weight(const CouplingGraph& g, int max_order) {
  if (g.system_indices.empty()) throw ValidationError("graph has no system nodes");
  const std::vector<double> inc = system_walk_increments(g, max_order);
  SystemBathWeight out;
  for (double v : inc) out.partial_sum += v;
  out.last_increment = inc.back();
  if (inc.size() >= 2) {
    const double prev = inc[inc.size() - 2];
    out.diverging = out.last_increment > prev && out.last_increment > 0.0;
  }
  return out;
}

RescaledGraph rescale_couplings(const CouplingGraph& g, double r) {
  if (!(r > 0.0)) throw ValidationError("rescale factor must be positive");
  RescaledGraph out;
  out.graph = g;
  out.graph.weights = g.weights / r;
  out.time_factor = r;
  out.below_recommended = r < double(max_connectivity(g)) * coupling_norm(g);
  return out;
}

}  // namespace lightcone
