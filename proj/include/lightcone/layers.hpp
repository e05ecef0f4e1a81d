// Copyright 2026 The Lightcone Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <vector>

#include "lightcone/coupling_graph.hpp"
#include "lightcone/dense_operator.hpp"
#include "lightcone/hamiltonian.hpp"

namespace lightcone {

/// Terms of a spec bucketed by graph distance from the system: intra[d]
/// collects terms supported entirely on layer d, inter[d] the terms bridging
/// layers d and d+1.  Terms whose sites are unreachable from the system are
/// excluded from every layer and listed separately.
struct LayerDecomposition {
  HamiltonianSpec spec;                            ///< source spec (copied)
  std::vector<std::optional<int>> site_distance;   ///< per spec.sites order
  std::vector<std::vector<int>> intra;             ///< term indices, bucket d
  std::vector<std::vector<int>> inter;             ///< term indices, bucket (d, d+1)
  std::vector<int> unreachable_terms;              ///< term indices
  int depth = 0;                                   ///< max finite site distance
};

[[nodiscard]] LayerDecomposition layer_partition(const HamiltonianSpec& spec,
                                                 const CouplingGraph& g);

/// Truncated generator keeping buckets intra[0..n] and inter[0..n-1]; its
/// site set is every site within distance n of the system.  Intra-layer terms
/// of layer n act only on retained sites, so keeping them is free and makes
/// the truncation exact as soon as every coupling-graph edge lies within the
/// kept range.  For n past the deepest bucket this returns the full
/// (reachable) spec.
[[nodiscard]] HamiltonianSpec truncate_generator(const LayerDecomposition& ld, int n);

/// True when truncation at n already reproduces the full reachable spec.
[[nodiscard]] bool truncation_saturated(const LayerDecomposition& ld, int n);

/// Parameters of the closed-form propagation bound.
struct LRBoundParams {
  double op_norm = 1.0;    ///< max term-wise product of local operator norms
  double a_norm = 1.0;     ///< norm of the observable
  int s_size = 1;          ///< number of sites supporting the observable
  double mu = 1.0;         ///< decay-rate parameter of the bound family
  double velocity = 0.0;   ///< propagation speed, consistent with mu
};

/// v = 2 * op_norm * c^2 * ||J|| * e^mu / mu.  mu = 1 minimizes e^mu/mu.
[[nodiscard]] double lr_velocity(double op_norm, int connectivity, double coupling_norm_value,
                                 double mu = 1.0);

/// Params derived from a graph (connectivity and coupling norm measured on g).
[[nodiscard]] LRBoundParams make_lr_params(const CouplingGraph& g, double op_norm, double a_norm,
                                           int s_size, double mu = 1.0);

/// Closed-form truncation bound  min(s_size * a_norm * exp(-mu (n - v t)),
/// 2 * a_norm).  Decreasing in n, increasing in t while unclamped.
[[nodiscard]] double lr_error_bound(const LRBoundParams& p, int n, double t);

/// Explicit series bound on the truncation error: the first `tail_orders`
/// omitted orders are evaluated with exact walk weights restricted to the
/// reachable set I_d, the rest with the closed-form growth factor
/// (c^2 ||J||)^d.  Returns 0 when truncation at n is already exact for every
/// generator compatible with the graph (every edge within n layers), and
/// never exceeds the trivial isometry ceiling 2 a_norm.
[[nodiscard]] double remainder_bound_exact(const CouplingGraph& g, double op_norm, double a_norm,
                                           int n, double t, int tail_orders = 30);

/// Smallest n with closed-form bound <= epsilon:
/// ceil(v t + ln(s_size a_norm / epsilon)/mu), clamped to >= 1.
[[nodiscard]] int min_layers(const LRBoundParams& p, double t, double epsilon);

/// One point of the layer-resolution flow: at horizon t the bound needs n(t)
/// layers, and the system-bath walk weight accumulated over those layers is
/// j_partial.
struct FlowPoint {
  double t = 0.0;
  int n = 0;
  double j_partial = 0.0;
};

/// Evaluate n(t) and the accumulated walk weight on `g` (pass the rescaled
/// graph to study the flow after rescaling).
[[nodiscard]] std::vector<FlowPoint> renormalization_flow(const CouplingGraph& g,
                                                          const LRBoundParams& p,
                                                          const std::vector<double>& times,
                                                          double epsilon);

/// Dense verification that the first `order` nested commutators
/// C_k = [H, C_{k-1}], C_0 = A, are reproduced when H is replaced by the
/// k-layer truncation at every nesting level.
struct NestedCommutatorReport {
  std::vector<double> c_norm;            ///< ||C_k|| with the full generator
  std::vector<double> abs_discrepancy;   ///< ||C_k(full) - C_k(trunc)||
  std::vector<double> rel_discrepancy;   ///< abs / max(||C_k||, tiny)
  double max_rel = 0.0;
};
[[nodiscard]] NestedCommutatorReport nested_commutator_check(const HamiltonianSpec& spec,
                                                             const CouplingGraph& g,
                                                             const DenseOperator& a_sys,
                                                             int order,
                                                             std::int64_t cap = 4096);

}  // namespace lightcone
