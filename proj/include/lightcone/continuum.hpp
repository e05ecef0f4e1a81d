// Copyright 2026 The Lightcone Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "lightcone/dense_operator.hpp"
#include "lightcone/hamiltonian.hpp"

namespace lightcone {

/// Scalar coupling profile: named analytic forms or a tabulated curve with
/// linear interpolation (clamped beyond the table range).
class CouplingFunction {
 public:
  enum class Form { Const, Linear, Exp, Table };

  static CouplingFunction constant(double value);
  static CouplingFunction linear(double slope);
  static CouplingFunction exponential(double amp, double rate);  ///< amp * e^{-rate x}
  static CouplingFunction table(std::vector<std::pair<double, double>> points);

  [[nodiscard]] double operator()(double x) const;
  [[nodiscard]] Form form() const { return form_; }

  [[nodiscard]] static CouplingFunction from_json(const nlohmann::json& j);
  [[nodiscard]] nlohmann::json to_json() const;

 private:
  Form form_ = Form::Const;
  double a_ = 0.0;  // value | slope | amp
  double b_ = 0.0;  // rate
  std::vector<std::pair<double, double>> pts_;
};

/// A system coupled linearly to a continuum of bosonic modes on [0, x_max]
/// with site profile J, two-mode kernel K (argument |x - x'|), and on-mode
/// weight g.  The system block is a finite spec; the coupling operator O_S is
/// a named catalog operator on one system site.  Modes are truncated to
/// `boson_levels` states.
struct ContinuumBathSpec {
  double x_max = 1.0;
  CouplingFunction J = CouplingFunction::constant(0.0);
  CouplingFunction K = CouplingFunction::constant(0.0);
  CouplingFunction g = CouplingFunction::constant(0.0);
  HamiltonianSpec system;
  int system_op_site = 0;
  std::string system_op = "sx";
  int boson_levels = 2;
};

void validate_bath(const ContinuumBathSpec& bath);
[[nodiscard]] ContinuumBathSpec bath_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json bath_to_json(const ContinuumBathSpec& bath);
[[nodiscard]] ContinuumBathSpec load_bath_file(const std::string& path);

/// Left-endpoint partition of [0, x_max]: cell i is [points[i], points[i] +
/// widths[i]); widths sum to x_max - points[0].
struct Partition {
  std::vector<double> points;
  std::vector<double> widths;
  double x_max = 0.0;

  [[nodiscard]] int size() const { return int(points.size()); }
  [[nodiscard]] double norm() const;  ///< max width
};

[[nodiscard]] Partition make_partition(double x_max, int n);  ///< uniform
[[nodiscard]] Partition partition_from_points(double x_max, std::vector<double> points);
void validate_partition(const Partition& p);

/// Discretized generator on the partition: couplings J~_i = J(x_i) dx_i,
/// K~_ij = K(|x_i - x_j|) dx_i dx_j, g~_i = g(x_i) dx_i; mode-mode terms
/// carry the kernel prefactor 2 explicitly; on-mode occupation terms use
/// g~_i.  Mode site ids start after the largest system id.
[[nodiscard]] HamiltonianSpec build_surrogate(const ContinuumBathSpec& bath, const Partition& p);

/// Same surrogate, but mode ids are chosen so that every test point occupies
/// the id of the matching point of `reference` (points must coincide within
/// 1e-9 x_max).  The result embeds directly into the reference surrogate's
/// site frame.
[[nodiscard]] HamiltonianSpec build_surrogate_on_slots(const ContinuumBathSpec& bath,
                                                       const Partition& p_test,
                                                       const Partition& reference);

/// Sum of the discretized site couplings J~_i; converges to the integral of
/// J as the partition refines.
[[nodiscard]] double partition_weight(const ContinuumBathSpec& bath, const Partition& p);

/// A-priori bound on |sum_i f(x_i) dx_i - integral of f| for the
/// left-endpoint rule: sum_i (dx_i^2/2) sup_cell|f'|, with the per-cell sup
/// estimated from finite differences on `derivative_grid` sample points
/// spread over the partition (>= 10 per cell) and inflated by 1.25.
/// derivative_grid = 0 picks a default.
[[nodiscard]] double riemann_remainder(const std::function<double(double)>& f, const Partition& p,
                                       int derivative_grid = 0);

/// Measured counterpart: exact gap between the Riemann sums of `p` and of a
/// refining partition `reference`, accumulated cell by cell.
[[nodiscard]] double riemann_gap_vs_reference(const std::function<double(double)>& f,
                                              const Partition& p, const Partition& reference);

/// Everything the continuum bound produces for one partition.
struct ContinuumBoundReport {
  int n = 0;               ///< partition size
  double norm_pn = 0.0;    ///< partition norm (max width)
  double t = 0.0;
  double a_norm = 1.0;
  // commutator-side components (operator-norm factors included)
  double r_j = 0.0;
  double r_jk = 0.0;
  double r_gk = 0.0;
  double r_k = 0.0;
  double r_b = 0.0;        ///< ||O_S|| r_jk + r_gk + r_k
  double sys_comm_norm = 0.0;  ///< ||[H_S, O_S]||
  double o_s_norm = 0.0;       ///< ||O_S||
  double comm_norm_bound = 0.0;  ///< 2 (||[H_S,O_S]|| r_j + r_b)
  // generator-difference side
  double h_diff_norm_bound = 0.0;
  // assembled bound
  double r1 = 0.0;
  double r2 = 0.0;
  double total = 0.0;
};

/// A-priori (derivative-estimator) bound components for partition `p` against
/// the true continuum.  Fills the commutator-side fields.
[[nodiscard]] ContinuumBoundReport commutator_norm_bound(const ContinuumBathSpec& bath,
                                                         const Partition& p,
                                                         int derivative_grid = 0);

/// A-priori bound on ||H - H_P||:
///   ||O_S|| 2||c|| RR(J) + 2 (2||c||^2 + ||c||^4) RR2(K) + ||c||^2 RR(g),
/// where RR is the 1-D estimator and RR2 the tensorized 2-D estimator over
/// the triangle x < x', including the uncovered diagonal strip.
[[nodiscard]] double h_diff_norm_bound(const ContinuumBathSpec& bath, const Partition& p,
                                       int derivative_grid = 0);

/// Perturbative polynomial piece: a_norm * X (2 + X) with
/// X = t^2 (||[H_S,O_S]|| r_j + r_b).
[[nodiscard]] double r1_bound(const ContinuumBathSpec& bath, const Partition& p, double t,
                              double a_norm);

/// Direct-difference piece: a_norm (e^{2 h_diff t} - 1); +infinity once the
/// exponent exceeds 700.
[[nodiscard]] double r2_bound(double a_norm, double h_diff, double t);

/// Full a-priori report: r1 + r2 and all components.
[[nodiscard]] ContinuumBoundReport total_bound(const ContinuumBathSpec& bath, const Partition& p,
                                               double t, double a_norm);

/// Certified bound of the test partition against a refining reference
/// partition: every component is measured from the coupling differences of
/// the two discretizations (with exact elementary operator-norm factors), so
/// r1 + r2 provably dominates the dynamical error between the two surrogates.
[[nodiscard]] ContinuumBoundReport reference_bound_report(const ContinuumBathSpec& bath,
                                                          const Partition& p_test,
                                                          const Partition& reference, double t,
                                                          double a_norm);

/// Coarsest power-of-two uniform partition with total_bound <= epsilon,
/// searched by doubling n from 1 up to n_max; throws ResolutionError (with
/// the best n and bound) when the budget is exhausted.
[[nodiscard]] int required_resolution(const ContinuumBathSpec& bath, double t, double epsilon,
                                      int n_max = 4096, double a_norm = 1.0);

/// Resolution flow: per horizon t, the required partition size n(t) and the
/// accumulated coupling weight of that partition.
struct ContinuumFlowPoint {
  double t = 0.0;
  int n = 0;
  double j_weight = 0.0;
};
[[nodiscard]] std::vector<ContinuumFlowPoint> continuum_flow(const ContinuumBathSpec& bath,
                                                             const std::vector<double>& times,
                                                             double epsilon, int n_max = 4096,
                                                             double a_norm = 1.0);

/// Precomputed reference evolution context for empirical error measurements.
struct ContinuumReference {
  HamiltonianSpec surrogate;
  Partition partition;
  DenseOperator h;
  HermitianEigen eig;
  Eigen::MatrixXcd a_eigenbasis;  ///< observable in the reference eigenbasis
  double a_norm = 0.0;
  int observable_site = 0;
  std::string observable_op;
};
[[nodiscard]] ContinuumReference make_continuum_reference(const ContinuumBathSpec& bath,
                                                          const Partition& reference,
                                                          int observable_site,
                                                          const std::string& observable_op,
                                                          std::int64_t cap = kDefaultDimCap);

/// || A(t) under the reference surrogate - A(t) under the test surrogate ||,
/// both embedded on the reference space.
[[nodiscard]] double reference_truncation_error(const ContinuumReference& ref,
                                                const ContinuumBathSpec& bath,
                                                const Partition& p_test, double t);

}  // namespace lightcone
