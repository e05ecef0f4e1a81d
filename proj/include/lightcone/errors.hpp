// Copyright 2026 The Lightcone Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace lightcone {

/// Malformed input: bad JSON, inconsistent site references, non-Hermitian
/// generators, out-of-range parameters.  Maps to CLI exit code 4.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// A requested dense computation exceeds the configured Hilbert-space budget.
class ResourceError : public std::runtime_error {
 public:
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

/// An iterative numeric kernel failed to converge to its tolerance.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when a resolution search exhausts its budget; carries the best
/// partition size reached and the bound value attained there.
class ResolutionError : public std::runtime_error {
 public:
  ResolutionError(const std::string& what, int best_n, double best_bound)
      : std::runtime_error(what), best_n(best_n), best_bound(best_bound) {}
  int best_n;
  double best_bound;
};

}  // namespace lightcone
