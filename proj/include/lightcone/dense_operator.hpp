// Copyright 2026 The Lightcone Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "lightcone/hamiltonian.hpp"

namespace lightcone {

/// Default Hilbert-space budget for dense work (product of local dims).
inline constexpr std::int64_t kDefaultDimCap = std::int64_t(1) << 14;

/// A dense operator over an ordered list of tensor factors.  The matrix is
/// indexed with the first listed site as the slowest (most significant)
/// tensor digit.
struct DenseOperator {
  std::vector<int> site_ids;
  std::vector<int> dims;
  Eigen::MatrixXcd matrix;
  std::string label;

  [[nodiscard]] std::int64_t dim() const { return matrix.rows(); }
};

/// Assemble the sum of product terms into one dense matrix over the spec's
/// site order.  Throws ResourceError above `cap` (cap <= 0 disables).
[[nodiscard]] DenseOperator assemble_operator(const HamiltonianSpec& spec,
                                              std::int64_t cap = kDefaultDimCap);

/// A single named catalog operator viewed as a one-site DenseOperator.
[[nodiscard]] DenseOperator make_site_operator(const HamiltonianSpec& spec, int site_id,
                                               const std::string& op_name);

/// Embed `A` into the space spanned by `full_sites` (identity on sites absent
/// from A).  A's sites must appear in `full_sites` in the same relative
/// order, with matching dimensions.
[[nodiscard]] DenseOperator embed_operator(const DenseOperator& A,
                                           const std::vector<SiteSpec>& full_sites,
                                           std::int64_t cap = kDefaultDimCap);

/// Largest singular value.  Dense decomposition below dimension 512; at or
/// above that, Hermitian inputs use an exact eigenvalue computation and
/// general inputs use power iteration with relative tolerance 1e-10.  Throws
/// NumericError when the iteration fails to converge.
[[nodiscard]] double spectral_norm(const Eigen::MatrixXcd& m);

/// Eigen-decomposition of a Hermitian matrix (spectrum ascending).  Validates
/// Hermiticity and throws ValidationError otherwise.
struct HermitianEigen {
  Eigen::VectorXd evals;
  Eigen::MatrixXcd evecs;
};
[[nodiscard]] HermitianEigen hermitian_eigen(const Eigen::MatrixXcd& h);

/// Helpers for repeated evolutions under one generator: M = V^dag A V, its
/// phase-conjugated image at time t (still expressed in the eigenbasis), and
/// the transform back.
[[nodiscard]] Eigen::MatrixXcd to_eigenbasis(const HermitianEigen& eig,
                                             const Eigen::MatrixXcd& a);
[[nodiscard]] Eigen::MatrixXcd evolve_in_eigenbasis(const HermitianEigen& eig,
                                                    const Eigen::MatrixXcd& a_eig, double t);
[[nodiscard]] Eigen::MatrixXcd from_eigenbasis(const HermitianEigen& eig,
                                               const Eigen::MatrixXcd& a_eig);

/// Heisenberg evolution A(t) = e^{iHt} A e^{-iHt} by exact diagonalization.
[[nodiscard]] Eigen::MatrixXcd evolve_heisenberg(const Eigen::MatrixXcd& h,
                                                 const Eigen::MatrixXcd& a, double t);

/// || A_full(t) - A_trunc(t) || for two generators on the same space.
/// `h_trunc` may live on a subset of `h_full`'s sites; it is embedded first.
/// `a` may live on a subset as well.
[[nodiscard]] double truncation_error(const DenseOperator& h_full, const DenseOperator& h_trunc,
                                      const DenseOperator& a, double t);

/// First-order product-formula step count for total accuracy budget eps2:
/// ceil(op_norm^2 t^2 n_terms^2 / eps2), at least 1.
[[nodiscard]] std::int64_t trotter_steps(double op_norm, double t, std::int64_t n_terms,
                                         double eps2);

/// First-order product formula: U = (prod_k e^{-i h_k t/steps})^steps with
/// factors multiplied left to right in the spec's term order.
[[nodiscard]] Eigen::MatrixXcd trotter_propagate(const HamiltonianSpec& spec, double t,
                                                 std::int64_t steps,
                                                 std::int64_t cap = kDefaultDimCap);

/// Single-qubit compilation cost model: ceil(a * n_d * log2(n_d/eps2)^b),
/// with the logarithm clamped at zero.
[[nodiscard]] std::int64_t sk_gate_count(std::int64_t n_d, double eps2, double a, double b);

/// Binary dump: magic "LCOP", version, site ids/dims, label, then row-major
/// complex128 payload (native little-endian layout).
void save_operator(const DenseOperator& op, const std::string& path);
[[nodiscard]] DenseOperator load_operator(const std::string& path);

}  // namespace lightcone
