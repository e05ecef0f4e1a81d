// Copyright 2026 The Lightcone Authors
// SPDX-License-Identifier: Apache-2.0
#include "lightcone/layers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "lightcone/errors.hpp"

namespace lightcone {

LayerDecomposition layer_partition(const HamiltonianSpec& spec, const CouplingGraph& g) {
  validate_spec(spec);
  LayerDecomposition ld;
  ld.spec = spec;
  const auto dist = distances_from_system(g);
  ld.site_distance.resize(spec.sites.size());
  int depth = 0;
  for (std::size_t k = 0; k < spec.sites.size(); ++k) {
    const int gi = g.index_of(spec.sites[k].id);
    if (gi < 0) throw ValidationError("layer_partition: graph does not cover the spec");
    ld.site_distance[k] = dist[std::size_t(gi)];
    if (ld.site_distance[k]) depth = std::max(depth, *ld.site_distance[k]);
  }
  ld.depth = depth;
  ld.intra.assign(std::size_t(depth) + 1, {});
  ld.inter.assign(std::size_t(depth) + 1, {});
  for (std::size_t t = 0; t < spec.terms.size(); ++t) {
    const auto& term = spec.terms[t];
    int dmin = std::numeric_limits<int>::max();
    int dmax = -1;
    bool reachable = true;
    for (int id : term.sites) {
      const auto d = ld.site_distance[std::size_t(spec.site_index(id))];
      if (!d) {
        reachable = false;
        break;
      }
      dmin = std::min(dmin, *d);
      dmax = std::max(dmax, *d);
    }
    if (!reachable) {
      ld.unreachable_terms.push_back(int(t));
      continue;
    }
    if (dmax - dmin == 0) {
      ld.intra[std::size_t(dmin)].push_back(int(t));
    } else if (dmax - dmin == 1) {
      ld.inter[std::size_t(dmin)].push_back(int(t));
    } else {
      // Cannot happen for a graph built from this spec: all sites of a term
      // are mutually adjacent, so their distances differ by at most one.
      throw ValidationError("layer_partition: term " + std::to_string(t) +
                            " spans more than two layers");
    }
  }
  return ld;
}

HamiltonianSpec truncate_generator(const LayerDecomposition& ld, int n) {
  if (n < 1) throw ValidationError("truncate_generator: n must be >= 1");
  HamiltonianSpec out;
  out.system_ids = ld.spec.system_ids;
  for (std::size_t k = 0; k < ld.spec.sites.size(); ++k) {
    const auto d = ld.site_distance[k];
    if (d && *d <= n) out.sites.push_back(ld.spec.sites[k]);
  }
  // Keep the boundary bucket h_{n-1,n} and every intra-layer bucket up to and
  // including layer n: those terms act entirely on sites that are retained
  // anyway, so keeping them costs nothing and makes truncation exact as soon
  // as every edge of the coupling graph is within the kept range.
  std::vector<int> keep;
  for (int d = 0; d < int(ld.intra.size()) && d <= n; ++d) {
    keep.insert(keep.end(), ld.intra[std::size_t(d)].begin(), ld.intra[std::size_t(d)].end());
    if (d <= n - 1)
      keep.insert(keep.end(), ld.inter[std::size_t(d)].begin(), ld.inter[std::size_t(d)].end());
  }
  std::sort(keep.begin(), keep.end());
  for (int t : keep) out.terms.push_back(ld.spec.terms[std::size_t(t)]);
  validate_spec(out);
  return out;
}

bool truncation_saturated(const LayerDecomposition& ld, int n) {
  std::size_t reachable = ld.spec.terms.size() - ld.unreachable_terms.size();
  std::size_t kept = 0;
  for (int d = 0; d < int(ld.intra.size()) && d <= n; ++d) {
    kept += ld.intra[std::size_t(d)].size();
    if (d <= n - 1) kept += ld.inter[std::size_t(d)].size();
  }
  return kept == reachable;
}

double lr_velocity(double op_norm, int connectivity, double coupling_norm_value, double mu) {
  if (!(mu > 0.0)) throw ValidationError("lr_velocity: mu must be positive");
  return 2.0 * op_norm * double(connectivity) * double(connectivity) * coupling_norm_value *
         std::exp(mu) / mu;
}

LRBoundParams make_lr_params(const CouplingGraph& g, double op_norm, double a_norm, int s_size,
                             double mu) {
  LRBoundParams p;
  p.op_norm = op_norm;
  p.a_norm = a_norm;
  p.s_size = s_size;
  p.mu = mu;
  p.velocity = lr_velocity(op_norm, max_connectivity(g), coupling_norm(g), mu);
  return p;
}

double lr_error_bound(const LRBoundParams& p, int n, double t) {
  if (n < 0 || t < 0.0) throw ValidationError("lr_error_bound: n and t must be nonnegative");
  const double formula = double(p.s_size) * p.a_norm * std::exp(-p.mu * (double(n) - p.velocity * t));
  return std::min(formula, 2.0 * p.a_norm);
}

double remainder_bound_exact(const CouplingGraph& g, double op_norm, double a_norm, int n,
                             double t, int tail_orders) {
  if (n < 0 || t < 0.0)
    throw ValidationError("remainder_bound_exact: n and t must be nonnegative");
  if (tail_orders < 1) throw ValidationError("remainder_bound_exact: tail_orders must be >= 1");
  if (t == 0.0) return 0.0;

  const auto dist = distances_from_system(g);

  // Saturation: a bucket survives truncation at n exactly when the deeper
  // endpoint of its edge is within n layers, so once every reachable edge has
  // max endpoint distance <= n the truncated generator keeps every term and
  // the error vanishes identically.
  int deepest_edge = 0;
  for (int i = 0; i < g.size(); ++i)
    for (int j = i + 1; j < g.size(); ++j) {
      if (g.adjacency(i, j) == 0) continue;
      if (!dist[std::size_t(i)] || !dist[std::size_t(j)]) continue;  // detached from S
      deepest_edge = std::max(deepest_edge, std::max(*dist[std::size_t(i)], *dist[std::size_t(j)]));
    }
  if (n >= deepest_edge) return 0.0;

  const double x = 2.0 * t * op_norm;

  // Explicit orders n+1 .. n+tail_orders with exact restricted walk weights.
  double explicit_part = 0.0;
  // factor_d = x^d / d!
  double factor = 1.0;
  for (int d = 1; d <= n; ++d) factor *= x / double(d);
  for (int d = n + 1; d <= n + tail_orders; ++d) {
    factor *= x / double(d);
    if (!std::isfinite(factor)) return std::numeric_limits<double>::infinity();
    std::vector<int> ids;
    for (int k = 0; k < g.size(); ++k)
      if (dist[std::size_t(k)] && *dist[std::size_t(k)] <= d) ids.push_back(g.node_ids[std::size_t(k)]);
    explicit_part += factor * path_weight(g, d, ids);
  }

  // Geometric tail with the closed-form growth factor, summed forward.
  const double y = x * double(max_connectivity(g)) * double(max_connectivity(g)) * coupling_norm(g);
  double tail = 0.0;
  double term = 1.0;
  const int start = n + tail_orders + 1;
  for (int d = 1; d < start; ++d) {
    term *= y / double(d);
    if (!std::isfinite(term)) return std::numeric_limits<double>::infinity();
  }
  for (int d = start; d < start + 512; ++d) {
    term *= y / double(d);
    if (!std::isfinite(term)) return std::numeric_limits<double>::infinity();
    tail += term;
    if (term < 1e-300 || term < 1e-16 * tail) break;
  }

  // The series can only improve on the trivial isometry ceiling 2 ||A||.
  return a_norm * std::min(explicit_part + tail, 2.0);
}

int min_layers(const LRBoundParams& p, double t, double epsilon) {
  if (!(epsilon > 0.0)) throw ValidationError("min_layers: epsilon must be positive");
  if (t < 0.0) throw ValidationError("min_layers: t must be nonnegative");
  const double raw = p.velocity * t + std::log(double(p.s_size) * p.a_norm / epsilon) / p.mu;
  if (raw > double(1 << 30)) throw ResourceError("min_layers: required depth is unreasonably large");
  const int n = int(std::ceil(raw));
  return std::max(1, n);
}

std::vector<FlowPoint> renormalization_flow(const CouplingGraph& g, const LRBoundParams& p,
                                            const std::vector<double>& times, double epsilon) {
  std::vector<FlowPoint> out;
  out.reserve(times.size());
  for (double t : times) {
    FlowPoint fp;
    fp.t = t;
    fp.n = min_layers(p, t, epsilon);
    fp.j_partial = system_bath_weight(g, fp.n).partial_sum;
    out.push_back(fp);
  }
  return out;
}

NestedCommutatorReport nested_commutator_check(const HamiltonianSpec& spec,
                                               const CouplingGraph& g,
                                               const DenseOperator& a_sys, int order,
                                               std::int64_t cap) {
  if (order < 1 || order > 6)
    throw ValidationError("nested_commutator_check: order must be in 1..6");
  const LayerDecomposition ld = layer_partition(spec, g);
  const DenseOperator h_full = assemble_operator(spec, cap);
  std::vector<SiteSpec> frame;
  for (std::size_t k = 0; k < h_full.site_ids.size(); ++k)
    frame.push_back({h_full.site_ids[k], h_full.dims[k], SiteKind::Environment});
  const Eigen::MatrixXcd a0 = embed_operator(a_sys, frame, cap).matrix;

  const auto commutator = [](const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& y) {
    return (x * y - y * x).eval();
  };

  NestedCommutatorReport rep;
  Eigen::MatrixXcd c_full = a0;
  for (int k = 1; k <= order; ++k) {
    c_full = commutator(h_full.matrix, c_full);
    // Rebuild the truncated ladder from scratch with H_k at every level.
    const HamiltonianSpec trunc = truncate_generator(ld, k);
    const Eigen::MatrixXcd h_k = embed_operator(assemble_operator(trunc, cap), frame, cap).matrix;
    Eigen::MatrixXcd c_trunc = a0;
    for (int j = 0; j < k; ++j) c_trunc = commutator(h_k, c_trunc);

    const double cn = spectral_norm(c_full);
    const double diff = spectral_norm(c_full - c_trunc);
    rep.c_norm.push_back(cn);
    rep.abs_discrepancy.push_back(diff);
    rep.rel_discrepancy.push_back(cn > 1e-300 ? diff / cn : diff);
    rep.max_rel = std::max(rep.max_rel, rep.rel_discrepancy.back());
  }
  return rep;
}

}  // namespace lightcone
