// Copyright 2026 The Lightcone Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace lightcone {

/// A named single-site operator instantiated at a concrete local dimension.
struct OperatorCatalogEntry {
  std::string name;
  int dim = 0;
  Eigen::MatrixXcd matrix;
  double norm = 0.0;  ///< exact spectral norm of `matrix`
};

/// Names understood by the catalog.
///
/// Qubit operators (dim must be 2): "sx", "sy", "sz", "sp", "sm".
/// Truncated boson operators (any dim >= 2): "a", "adag", "n".
/// Identity (any dim >= 1): "id".
///
/// Conventions: sp = |0><1| (so sp + sm = sx), a|k> = sqrt(k)|k-1>,
/// n = adag * a = diag(0, 1, ..., dim-1).
///
/// Throws ValidationError for unknown names or incompatible dimensions.
[[nodiscard]] OperatorCatalogEntry catalog_entry(const std::string& name, int dim);

/// Convenience: just the matrix.
[[nodiscard]] Eigen::MatrixXcd local_operator(const std::string& name, int dim);

/// Convenience: just the exact spectral norm.
[[nodiscard]] double local_operator_norm(const std::string& name, int dim);

/// True if the catalog accepts (name, dim).
[[nodiscard]] bool catalog_has(const std::string& name, int dim);

/// All catalog names, for diagnostics.
[[nodiscard]] const std::vector<std::string>& catalog_names();

}  // namespace lightcone
