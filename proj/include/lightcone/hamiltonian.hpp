// Copyright 2026 The Lightcone Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace lightcone {

enum class SiteKind { System, Environment };

[[nodiscard]] std::string to_string(SiteKind kind);
[[nodiscard]] SiteKind site_kind_from_string(const std::string& s);

/// One degree of freedom with a finite local dimension.
struct SiteSpec {
  int id = 0;
  int dim = 2;
  SiteKind kind = SiteKind::Environment;
};

/// One product term  coeff * op_1(site_1) x ... x op_k(site_k).
struct InteractionTerm {
  std::vector<int> sites;        ///< distinct site ids, ordered
  std::vector<std::string> ops;  ///< catalog names, parallel to `sites`
  double coeff = 0.0;            ///< real, finite
};

/// A sum of product terms over a fixed site set.
struct HamiltonianSpec {
  std::vector<SiteSpec> sites;
  std::vector<InteractionTerm> terms;
  std::vector<int> system_ids;

  /// Index into `sites` for a given id; -1 if absent.
  [[nodiscard]] int site_index(int id) const;
  [[nodiscard]] int dim_of(int id) const;
  [[nodiscard]] bool is_system(int id) const;
  /// Product of local dimensions; throws ResourceError above `cap` (cap <= 0
  /// disables the check).
  [[nodiscard]] std::int64_t total_dim(std::int64_t cap = 0) const;
};

/// Structural validation; throws ValidationError with a specific message.
/// Checks: unique nonnegative ids, dims >= 2, terms referencing existing
/// distinct sites with catalog-compatible operators, finite coefficients,
/// nonempty system_ids consistent with site kinds.
void validate_spec(const HamiltonianSpec& spec);

/// JSON round trip.  The schema is
///   {"sites":[{"id":0,"dim":2,"kind":"system"},...],
///    "terms":[{"sites":[0,1],"ops":["sx","sx"],"coeff":0.3},...],
///    "system_ids":[0]}
/// Unknown fields are rejected.
[[nodiscard]] HamiltonianSpec spec_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json spec_to_json(const HamiltonianSpec& spec);
[[nodiscard]] HamiltonianSpec load_spec_file(const std::string& path);
void save_spec_file(const HamiltonianSpec& spec, const std::string& path);

/// Max over terms of the product of local operator norms (coefficients
/// excluded).  This is the interaction-strength constant used by the
/// propagation bounds.  Zero for a termless spec.
[[nodiscard]] double op_norm_max(const HamiltonianSpec& spec);

/// Divide every coefficient by r (> 0) and report the compensating time
/// factor r: evolving the rescaled spec for time r*t reproduces the original
/// dynamics at time t.
[[nodiscard]] std::pair<HamiltonianSpec, double> rescale_spec(const HamiltonianSpec& spec,
                                                              double r);

}  // namespace lightcone
