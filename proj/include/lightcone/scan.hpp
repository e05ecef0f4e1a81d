// Copyright 2026 The Lightcone Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "lightcone/continuum.hpp"
#include "lightcone/dense_operator.hpp"
#include "lightcone/hamiltonian.hpp"

namespace lightcone {

inline constexpr const char* kToolVersion = "0.1.0";

/// Experiment families the runner understands.
enum class ScanMode { DiscreteTruncation, ContinuumSurrogate, TrotterCost, Flow };

[[nodiscard]] std::string to_string(ScanMode m);
[[nodiscard]] ScanMode scan_mode_from_string(const std::string& s);

/// A named single-site operator acting as the tracked observable.
struct Observable {
  int site = 0;
  std::string op = "sz";
};

/// Declarative description of one scan.  The model is either a discrete spec
/// (discrete_truncation, trotter_cost, flow) or a continuum bath
/// (continuum_surrogate, flow); exactly one must be present.
struct ExperimentConfig {
  ScanMode mode = ScanMode::DiscreteTruncation;
  bool has_spec = false;
  HamiltonianSpec spec;
  bool has_bath = false;
  ContinuumBathSpec bath;
  Observable observable;
  std::vector<double> time_grid;
  std::vector<int> n_grid;   ///< layers | test resolutions | Trotter step counts
  int reference_n = 0;       ///< continuum mode: reference partition resolution
  double epsilon = 1e-2;     ///< flow target accuracy
  double mu = 1.0;           ///< decay-rate parameter for discrete bounds
  std::uint64_t seed = 0;
  std::int64_t cap = 0;      ///< Hilbert budget; 0 selects the default cap
  int n_max = 4096;          ///< flow: resolution search limit
  int threads = 0;           ///< work-pool width; 0 selects hardware width
  std::string output_path;   ///< optional; .json selects JSON, else CSV
};

void validate_config(const ExperimentConfig& c);
[[nodiscard]] ExperimentConfig config_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json config_to_json(const ExperimentConfig& c);
[[nodiscard]] ExperimentConfig load_config_file(const std::string& path);

/// One grid point of a scan.  Fields not meaningful for the mode stay at
/// their defaults (NaN for unset reals) and are omitted from that mode's CSV.
struct ReportRow {
  double t = 0.0;
  int n = 0;  ///< layers | test resolution | step count
  double bound_closed = std::numeric_limits<double>::quiet_NaN();
  double bound_exact = std::numeric_limits<double>::quiet_NaN();
  double empirical = std::numeric_limits<double>::quiet_NaN();
  double velocity = std::numeric_limits<double>::quiet_NaN();
  double mu = std::numeric_limits<double>::quiet_NaN();
  double norm_pn = std::numeric_limits<double>::quiet_NaN();
  double r_j = std::numeric_limits<double>::quiet_NaN();
  double r_b = std::numeric_limits<double>::quiet_NaN();
  double r1 = std::numeric_limits<double>::quiet_NaN();
  double r2 = std::numeric_limits<double>::quiet_NaN();
  double weight = std::numeric_limits<double>::quiet_NaN();  ///< flow only
  bool satisfied = false;
  bool skipped = false;
  std::string note;  ///< skip reason, JSON output only
};

/// Absolute slack applied when deciding `satisfied`.
inline constexpr double kVerifySlack = 1e-9;

struct VerificationReport {
  ScanMode mode = ScanMode::DiscreteTruncation;
  std::vector<ReportRow> rows;
  int satisfied_count = 0;
  int violated_count = 0;
  int skipped_count = 0;
  std::uint64_t config_hash = 0;
  std::string tool_version = kToolVersion;
  std::string generated_at;  ///< ISO-8601 UTC, excluded from determinism checks
};

[[nodiscard]] std::uint64_t fnv1a_hash(const std::string& bytes);

/// Execute every grid point of the scan in a work pool.  Bounds are always
/// evaluated; empirical errors only while the Hilbert budget allows, with
/// over-budget rows flagged `skipped` instead of aborting the scan.  Writes
/// the report to config.output_path when set, and returns it.
[[nodiscard]] VerificationReport run_experiment(const ExperimentConfig& config);

/// Exit verdicts for bound verification (values double as process exit codes).
enum class Verdict { Success = 0, Violation = 2, Indeterminate = 3 };

/// Success iff every non-skipped row is satisfied; indeterminate when no row
/// was checked at all.
[[nodiscard]] Verdict verify_bounds(const VerificationReport& report);
[[nodiscard]] std::vector<int> violating_rows(const VerificationReport& report);

/// CSV with a stable per-mode column schema; no timestamps, so identical
/// configs reproduce identical bytes.
[[nodiscard]] std::string report_csv(const VerificationReport& report);
[[nodiscard]] nlohmann::json report_to_json(const VerificationReport& report);
[[nodiscard]] VerificationReport report_from_json(const nlohmann::json& j);
[[nodiscard]] VerificationReport load_report_file(const std::string& path);

/// Write CSV or JSON depending on `format` ("csv" | "json").
void write_report(const VerificationReport& report, const std::string& path,
                  const std::string& format);

}  // namespace lightcone
