// Copyright 2026 The Lightcone Authors
// SPDX-License-Identifier: Apache-2.0
#include "lightcone/scan.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <thread>

#include <nlohmann/json.hpp>

#include "lightcone/coupling_graph.hpp"
#include "lightcone/errors.hpp"
#include "lightcone/layers.hpp"
#include "lightcone/operator_catalog.hpp"

namespace lightcone {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Mode names

std::string to_string(ScanMode m) {
  switch (m) {
    case ScanMode::DiscreteTruncation:
      return "discrete_truncation";
    case ScanMode::ContinuumSurrogate:
      return "continuum_surrogate";
    case ScanMode::TrotterCost:
      return "trotter_cost";
    case ScanMode::Flow:
      return "flow";
  }
  return "unknown";
}

ScanMode scan_mode_from_string(const std::string& s) {
  if (s == "discrete_truncation") return ScanMode::DiscreteTruncation;
  if (s == "continuum_surrogate") return ScanMode::ContinuumSurrogate;
  if (s == "trotter_cost") return ScanMode::TrotterCost;
  if (s == "flow") return ScanMode::Flow;
  throw ValidationError("unknown scan mode '" + s + "'");
}

// ---------------------------------------------------------------------------
// Config

void validate_config(const ExperimentConfig& c) {
  if (c.has_spec == c.has_bath)
    throw ValidationError("config: exactly one model (spec or bath) must be given");
  if (c.time_grid.empty()) throw ValidationError("config: time_grid must be nonempty");
  for (std::size_t k = 0; k < c.time_grid.size(); ++k) {
    if (!std::isfinite(c.time_grid[k]) || c.time_grid[k] < 0.0)
      throw ValidationError("config: times must be finite and nonnegative");
    if (k > 0 && !(c.time_grid[k] > c.time_grid[k - 1]))
      throw ValidationError("config: time_grid must be strictly increasing");
  }
  for (std::size_t k = 0; k < c.n_grid.size(); ++k) {
    if (c.n_grid[k] < 1) throw ValidationError("config: n_grid entries must be >= 1");
    if (k > 0 && !(c.n_grid[k] > c.n_grid[k - 1]))
      throw ValidationError("config: n_grid must be strictly increasing");
  }
  if (!(c.epsilon > 0.0)) throw ValidationError("config: epsilon must be positive");
  if (!(c.mu > 0.0)) throw ValidationError("config: mu must be positive");
  if (c.cap < 0) throw ValidationError("config: cap must be nonnegative");
  if (c.n_max < 1) throw ValidationError("config: n_max must be >= 1");
  if (c.threads < 0) throw ValidationError("config: threads must be nonnegative");

  const auto check_observable = [&](const HamiltonianSpec& s) {
    const int idx = s.site_index(c.observable.site);
    if (idx < 0) throw ValidationError("config: observable site not in the model");
    if (!s.is_system(c.observable.site))
      throw ValidationError("config: observable must act on a system site");
    if (!catalog_has(c.observable.op, s.sites[std::size_t(idx)].dim))
      throw ValidationError("config: observable operator incompatible with its site");
  };

  switch (c.mode) {
    case ScanMode::DiscreteTruncation:
      if (!c.has_spec) throw ValidationError("config: discrete_truncation needs a discrete model");
      if (c.n_grid.empty()) throw ValidationError("config: n_grid must be nonempty");
      check_observable(c.spec);
      break;
    case ScanMode::TrotterCost:
      if (!c.has_spec) throw ValidationError("config: trotter_cost needs a discrete model");
      if (c.n_grid.empty()) throw ValidationError("config: n_grid must be nonempty");
      check_observable(c.spec);
      break;
    case ScanMode::ContinuumSurrogate: {
      if (!c.has_bath) throw ValidationError("config: continuum_surrogate needs a bath model");
      if (c.n_grid.empty()) throw ValidationError("config: n_grid must be nonempty");
      if (c.reference_n < 1) throw ValidationError("config: reference_n must be >= 1");
      for (int n : c.n_grid)
        if (n > c.reference_n || c.reference_n % n != 0)
          throw ValidationError("config: every test resolution must divide reference_n");
      check_observable(c.bath.system);
      break;
    }
    case ScanMode::Flow:
      if (c.has_spec) check_observable(c.spec);
      if (c.has_bath) check_observable(c.bath.system);
      break;
  }
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("config: expected a JSON object");
  const std::map<std::string, int> allowed = {
      {"mode", 0},     {"model", 0},       {"observable", 0}, {"time_grid", 0}, {"n_grid", 0},
      {"reference_n", 0}, {"epsilon", 0},  {"mu", 0},         {"seed", 0},      {"cap", 0},
      {"n_max", 0},    {"threads", 0},     {"output_path", 0}};
  for (const auto& item : j.items())
    if (!allowed.count(item.key()))
      throw ValidationError("config: unknown field '" + item.key() + "'");
  for (const char* key : {"mode", "model", "observable", "time_grid"})
    if (!j.contains(key))
      throw ValidationError(std::string("config: missing field '") + key + "'");

  ExperimentConfig c;
  if (!j.at("mode").is_string()) throw ValidationError("config: mode must be a string");
  c.mode = scan_mode_from_string(j.at("mode").get<std::string>());

  const json& model = j.at("model");
  if (!model.is_object()) throw ValidationError("config: model must be an object");
  if (model.contains("x_max")) {
    c.bath = bath_from_json(model);
    c.has_bath = true;
  } else if (model.contains("sites")) {
    c.spec = spec_from_json(model);
    c.has_spec = true;
  } else {
    throw ValidationError("config: model must be a discrete spec or a continuum bath");
  }

  const json& obs = j.at("observable");
  if (!obs.is_object() || !obs.contains("site") || !obs.contains("op"))
    throw ValidationError("config: observable must be {\"site\": id, \"op\": name}");
  for (const auto& item : obs.items())
    if (item.key() != "site" && item.key() != "op")
      throw ValidationError("config: observable: unknown field '" + item.key() + "'");
  if (!obs.at("site").is_number_integer() || !obs.at("op").is_string())
    throw ValidationError("config: observable fields have wrong types");
  c.observable.site = obs.at("site").get<int>();
  c.observable.op = obs.at("op").get<std::string>();

  if (!j.at("time_grid").is_array()) throw ValidationError("config: time_grid must be an array");
  for (const auto& v : j.at("time_grid")) {
    if (!v.is_number()) throw ValidationError("config: time_grid entries must be numbers");
    c.time_grid.push_back(v.get<double>());
  }
  if (j.contains("n_grid")) {
    if (!j.at("n_grid").is_array()) throw ValidationError("config: n_grid must be an array");
    for (const auto& v : j.at("n_grid")) {
      if (!v.is_number_integer()) throw ValidationError("config: n_grid entries must be integers");
      c.n_grid.push_back(v.get<int>());
    }
  }
  const auto opt_num = [&](const char* key, auto& out) {
    if (!j.contains(key)) return;
    if (!j.at(key).is_number()) throw ValidationError(std::string("config: ") + key + " must be a number");
    out = j.at(key).get<std::decay_t<decltype(out)>>();
  };
  opt_num("reference_n", c.reference_n);
  opt_num("epsilon", c.epsilon);
  opt_num("mu", c.mu);
  opt_num("seed", c.seed);
  opt_num("cap", c.cap);
  opt_num("n_max", c.n_max);
  opt_num("threads", c.threads);
  if (j.contains("output_path")) {
    if (!j.at("output_path").is_string())
      throw ValidationError("config: output_path must be a string");
    c.output_path = j.at("output_path").get<std::string>();
  }
  validate_config(c);
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["mode"] = to_string(c.mode);
  j["model"] = c.has_bath ? bath_to_json(c.bath) : spec_to_json(c.spec);
  j["observable"] = {{"site", c.observable.site}, {"op", c.observable.op}};
  j["time_grid"] = c.time_grid;
  if (!c.n_grid.empty()) j["n_grid"] = c.n_grid;
  if (c.reference_n > 0) j["reference_n"] = c.reference_n;
  j["epsilon"] = c.epsilon;
  j["mu"] = c.mu;
  j["seed"] = c.seed;
  j["cap"] = c.cap;
  j["n_max"] = c.n_max;
  j["threads"] = c.threads;
  if (!c.output_path.empty()) j["output_path"] = c.output_path;
  return j;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ValidationError("cannot parse '" + path + "': " + e.what());
  }
  return config_from_json(j);
}

// ---------------------------------------------------------------------------
// Hashing and timestamps

std::uint64_t fnv1a_hash(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 1099511628211ULL;
  }
  return h;
}

namespace {

std::string utc_now_iso8601() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string fmt_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Per-mode row computation

struct DiscreteContext {
  CouplingGraph graph;
  LayerDecomposition layers;
  LRBoundParams params;
  bool dense_ok = false;
  std::string dense_note;
  DenseOperator h_full;
  DenseOperator a_site;
  std::map<int, DenseOperator> h_trunc;  // per layer count
};

DiscreteContext make_discrete_context(const ExperimentConfig& c, std::int64_t cap) {
  DiscreteContext ctx;
  ctx.graph = build_graph(c.spec);
  ctx.layers = layer_partition(c.spec, ctx.graph);
  const double a_norm =
      local_operator_norm(c.observable.op, c.spec.dim_of(c.observable.site));
  ctx.params = make_lr_params(ctx.graph, op_norm_max(c.spec), a_norm, 1, c.mu);
  ctx.a_site = make_site_operator(c.spec, c.observable.site, c.observable.op);
  try {
    ctx.h_full = assemble_operator(c.spec, cap);
    for (int n : c.n_grid) ctx.h_trunc.emplace(n, assemble_operator(truncate_generator(ctx.layers, n), cap));
    ctx.dense_ok = true;
  } catch (const ResourceError& e) {
    ctx.dense_ok = false;
    ctx.dense_note = e.what();
  }
  return ctx;
}

struct TrotterContext {
  double term_norm_max = 0.0;  // max over terms of |coeff| * prod local norms
  std::int64_t n_terms = 0;
  bool dense_ok = false;
  std::string dense_note;
  HermitianEigen eig;  // of the assembled generator
};

TrotterContext make_trotter_context(const ExperimentConfig& c, std::int64_t cap) {
  TrotterContext ctx;
  ctx.n_terms = std::int64_t(c.spec.terms.size());
  for (const auto& term : c.spec.terms) {
    double norm = std::abs(term.coeff);
    for (std::size_t k = 0; k < term.sites.size(); ++k)
      norm *= local_operator_norm(term.ops[k], c.spec.dim_of(term.sites[k]));
    ctx.term_norm_max = std::max(ctx.term_norm_max, norm);
  }
  try {
    const DenseOperator h = assemble_operator(c.spec, cap);
    ctx.eig = hermitian_eigen(h.matrix);
    ctx.dense_ok = true;
  } catch (const ResourceError& e) {
    ctx.dense_ok = false;
    ctx.dense_note = e.what();
  }
  return ctx;
}

Eigen::MatrixXcd propagator_from_eigen(const HermitianEigen& eig, double t) {
  const Eigen::Index dim = eig.evals.size();
  Eigen::VectorXcd phases(dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    phases(i) = std::exp(std::complex<double>(0.0, -eig.evals(i) * t));
  return eig.evecs * phases.asDiagonal() * eig.evecs.adjoint();
}

struct ContinuumContext {
  Partition reference;
  double a_norm = 0.0;
  bool dense_ok = false;
  std::string dense_note;
  std::optional<ContinuumReference> ref;
};

ContinuumContext make_continuum_context(const ExperimentConfig& c, std::int64_t cap) {
  ContinuumContext ctx;
  ctx.reference = make_partition(c.bath.x_max, c.reference_n);
  ctx.a_norm =
      local_operator_norm(c.observable.op, c.bath.system.dim_of(c.observable.site));
  try {
    ctx.ref.emplace(make_continuum_reference(c.bath, ctx.reference, c.observable.site,
                                             c.observable.op, cap));
    ctx.dense_ok = true;
  } catch (const ResourceError& e) {
    ctx.dense_ok = false;
    ctx.dense_note = e.what();
  }
  return ctx;
}

}  // namespace

// ---------------------------------------------------------------------------
// Runner

VerificationReport run_experiment(const ExperimentConfig& config) {
  validate_config(config);
  const std::int64_t cap = config.cap > 0 ? config.cap : kDefaultDimCap;

  VerificationReport report;
  report.mode = config.mode;
  report.config_hash = fnv1a_hash(config_to_json(config).dump());
  report.generated_at = utc_now_iso8601();

  // Shared read-only context, built before the pool starts.
  std::optional<DiscreteContext> dctx;
  std::optional<TrotterContext> tctx;
  std::optional<ContinuumContext> cctx;
  std::optional<LRBoundParams> flow_params;
  std::optional<CouplingGraph> flow_graph;
  double flow_a_norm = 0.0;
  switch (config.mode) {
    case ScanMode::DiscreteTruncation:
      dctx = make_discrete_context(config, cap);
      break;
    case ScanMode::TrotterCost:
      tctx = make_trotter_context(config, cap);
      break;
    case ScanMode::ContinuumSurrogate:
      cctx = make_continuum_context(config, cap);
      break;
    case ScanMode::Flow:
      if (config.has_spec) {
        flow_graph = build_graph(config.spec);
        const double a_norm =
            local_operator_norm(config.observable.op, config.spec.dim_of(config.observable.site));
        flow_params = make_lr_params(*flow_graph, op_norm_max(config.spec), a_norm, 1, config.mu);
      } else {
        flow_a_norm =
            local_operator_norm(config.observable.op, config.bath.system.dim_of(config.observable.site));
      }
      break;
  }

  const int n_times = int(config.time_grid.size());
  const int n_inner = config.mode == ScanMode::Flow ? 1 : int(config.n_grid.size());
  const int n_rows = n_times * n_inner;
  report.rows.resize(std::size_t(n_rows));

  const auto compute_row = [&](int index) {
    const int ti = index / n_inner;
    const double t = config.time_grid[std::size_t(ti)];
    ReportRow row;
    row.t = t;
    switch (config.mode) {
      case ScanMode::DiscreteTruncation: {
        const int n = config.n_grid[std::size_t(index % n_inner)];
        row.n = n;
        row.mu = config.mu;
        row.velocity = dctx->params.velocity;
        row.bound_closed = lr_error_bound(dctx->params, n, t);
        row.bound_exact =
            remainder_bound_exact(dctx->graph, dctx->params.op_norm, dctx->params.a_norm, n, t);
        if (dctx->dense_ok) {
          row.empirical = truncation_error(dctx->h_full, dctx->h_trunc.at(n), dctx->a_site, t);
          row.satisfied =
              row.empirical <= std::min(row.bound_closed, row.bound_exact) + kVerifySlack;
        } else {
          row.skipped = true;
          row.note = dctx->dense_note;
        }
        break;
      }
      case ScanMode::TrotterCost: {
        const int steps = config.n_grid[std::size_t(index % n_inner)];
        row.n = steps;
        const double budget = tctx->term_norm_max * double(tctx->n_terms);
        row.bound_exact = budget * budget * t * t / double(steps);
        if (tctx->dense_ok) {
          const Eigen::MatrixXcd u_exact = propagator_from_eigen(tctx->eig, t);
          const Eigen::MatrixXcd u_trotter = trotter_propagate(config.spec, t, steps, cap);
          row.empirical = spectral_norm(u_exact - u_trotter);
          row.satisfied = row.empirical <= row.bound_exact + kVerifySlack;
        } else {
          row.skipped = true;
          row.note = tctx->dense_note;
        }
        break;
      }
      case ScanMode::ContinuumSurrogate: {
        const int n = config.n_grid[std::size_t(index % n_inner)];
        row.n = n;
        const Partition p_test = make_partition(config.bath.x_max, n);
        const ContinuumBoundReport rep =
            reference_bound_report(config.bath, p_test, cctx->reference, t, cctx->a_norm);
        row.norm_pn = rep.norm_pn;
        row.r_j = rep.r_j;
        row.r_b = rep.r_b;
        row.r1 = rep.r1;
        row.r2 = rep.r2;
        row.bound_exact = rep.total;
        if (cctx->dense_ok) {
          row.empirical = reference_truncation_error(*cctx->ref, config.bath, p_test, t);
          row.satisfied = row.empirical <= row.bound_exact + kVerifySlack;
        } else {
          row.skipped = true;
          row.note = cctx->dense_note;
        }
        break;
      }
      case ScanMode::Flow: {
        if (config.has_spec) {
          row.n = min_layers(*flow_params, t, config.epsilon);
          row.weight = system_bath_weight(*flow_graph, row.n).partial_sum;
        } else {
          row.n = required_resolution(config.bath, t, config.epsilon, config.n_max, flow_a_norm);
          row.weight = partition_weight(config.bath, make_partition(config.bath.x_max, row.n));
        }
        row.satisfied = true;
        break;
      }
    }
    return row;
  };

  std::atomic<int> next{0};
  std::exception_ptr first_error = nullptr;
  std::mutex error_mu;
  const auto worker = [&]() {
    while (true) {
      const int index = next.fetch_add(1);
      if (index >= n_rows) return;
      try {
        report.rows[std::size_t(index)] = compute_row(index);
      } catch (const ResourceError& e) {
        ReportRow row;
        row.t = config.time_grid[std::size_t(index / n_inner)];
        row.n = config.mode == ScanMode::Flow ? 0 : config.n_grid[std::size_t(index % n_inner)];
        row.skipped = true;
        row.note = e.what();
        report.rows[std::size_t(index)] = row;
      } catch (const ResolutionError& e) {
        ReportRow row;
        row.t = config.time_grid[std::size_t(index / n_inner)];
        row.skipped = true;
        row.note = e.what();
        report.rows[std::size_t(index)] = row;
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  int width = config.threads > 0 ? config.threads : int(std::thread::hardware_concurrency());
  width = std::max(1, std::min(width, n_rows));
  if (width == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(std::size_t(width));
    for (int k = 0; k < width; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  for (const ReportRow& row : report.rows) {
    if (row.skipped)
      ++report.skipped_count;
    else if (row.satisfied)
      ++report.satisfied_count;
    else
      ++report.violated_count;
  }

  if (!config.output_path.empty()) write_report(report, config.output_path, "");
  return report;
}

// ---------------------------------------------------------------------------
// Verdicts

Verdict verify_bounds(const VerificationReport& report) {
  if (report.rows.empty() || report.skipped_count == int(report.rows.size()))
    return Verdict::Indeterminate;
  return report.violated_count == 0 ? Verdict::Success : Verdict::Violation;
}

std::vector<int> violating_rows(const VerificationReport& report) {
  std::vector<int> out;
  for (std::size_t k = 0; k < report.rows.size(); ++k)
    if (!report.rows[k].skipped && !report.rows[k].satisfied) out.push_back(int(k));
  return out;
}

// ---------------------------------------------------------------------------
// Serialization

std::string report_csv(const VerificationReport& report) {
  std::string out;
  const auto flag = [](bool b) { return b ? "1" : "0"; };
  switch (report.mode) {
    case ScanMode::DiscreteTruncation:
      out = "t,n,bound_closed_form,bound_exact_series,empirical_error,velocity,mu,satisfied,skipped\n";
      for (const auto& r : report.rows)
        out += fmt_double(r.t) + "," + std::to_string(r.n) + "," + fmt_double(r.bound_closed) +
               "," + fmt_double(r.bound_exact) + "," + fmt_double(r.empirical) + "," +
               fmt_double(r.velocity) + "," + fmt_double(r.mu) + "," + flag(r.satisfied) + "," +
               flag(r.skipped) + "\n";
      break;
    case ScanMode::ContinuumSurrogate:
      out = "t,n,norm_Pn,r_j,r_b,r1,r2,total,empirical_error,satisfied,skipped\n";
      for (const auto& r : report.rows)
        out += fmt_double(r.t) + "," + std::to_string(r.n) + "," + fmt_double(r.norm_pn) + "," +
               fmt_double(r.r_j) + "," + fmt_double(r.r_b) + "," + fmt_double(r.r1) + "," +
               fmt_double(r.r2) + "," + fmt_double(r.bound_exact) + "," + fmt_double(r.empirical) +
               "," + flag(r.satisfied) + "," + flag(r.skipped) + "\n";
      break;
    case ScanMode::TrotterCost:
      out = "t,steps,bound,empirical_error,satisfied,skipped\n";
      for (const auto& r : report.rows)
        out += fmt_double(r.t) + "," + std::to_string(r.n) + "," + fmt_double(r.bound_exact) +
               "," + fmt_double(r.empirical) + "," + flag(r.satisfied) + "," + flag(r.skipped) +
               "\n";
      break;
    case ScanMode::Flow:
      out = "t,n,weight\n";
      for (const auto& r : report.rows)
        out += fmt_double(r.t) + "," + std::to_string(r.n) + "," + fmt_double(r.weight) + "\n";
      break;
  }
  return out;
}

namespace {

void put_if_set(json& j, const char* key, double v) {
  if (!std::isnan(v)) j[key] = v;
}

double get_or_nan(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::numeric_limits<double>::quiet_NaN();
  return j.at(key).get<double>();
}

std::string hash_hex(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

json report_to_json(const VerificationReport& report) {
  json rows = json::array();
  for (const auto& r : report.rows) {
    json row;
    row["t"] = r.t;
    row["n"] = r.n;
    put_if_set(row, "bound_closed", r.bound_closed);
    put_if_set(row, "bound_exact", r.bound_exact);
    put_if_set(row, "empirical", r.empirical);
    put_if_set(row, "velocity", r.velocity);
    put_if_set(row, "mu", r.mu);
    put_if_set(row, "norm_Pn", r.norm_pn);
    put_if_set(row, "r_j", r.r_j);
    put_if_set(row, "r_b", r.r_b);
    put_if_set(row, "r1", r.r1);
    put_if_set(row, "r2", r.r2);
    put_if_set(row, "weight", r.weight);
    row["satisfied"] = r.satisfied;
    row["skipped"] = r.skipped;
    if (!r.note.empty()) row["note"] = r.note;
    rows.push_back(std::move(row));
  }
  json j;
  j["mode"] = to_string(report.mode);
  j["rows"] = std::move(rows);
  j["summary"] = {{"satisfied", report.satisfied_count},
                  {"violated", report.violated_count},
                  {"skipped", report.skipped_count}};
  j["provenance"] = {{"config_hash", hash_hex(report.config_hash)},
                     {"tool_version", report.tool_version},
                     {"generated_at", report.generated_at}};
  return j;
}

VerificationReport report_from_json(const json& j) {
  if (!j.is_object() || !j.contains("mode") || !j.contains("rows"))
    throw ValidationError("report: missing 'mode' or 'rows'");
  VerificationReport report;
  report.mode = scan_mode_from_string(j.at("mode").get<std::string>());
  for (const auto& row : j.at("rows")) {
    ReportRow r;
    r.t = get_or_nan(row, "t");
    r.n = row.contains("n") ? row.at("n").get<int>() : 0;
    r.bound_closed = get_or_nan(row, "bound_closed");
    r.bound_exact = get_or_nan(row, "bound_exact");
    r.empirical = get_or_nan(row, "empirical");
    r.velocity = get_or_nan(row, "velocity");
    r.mu = get_or_nan(row, "mu");
    r.norm_pn = get_or_nan(row, "norm_Pn");
    r.r_j = get_or_nan(row, "r_j");
    r.r_b = get_or_nan(row, "r_b");
    r.r1 = get_or_nan(row, "r1");
    r.r2 = get_or_nan(row, "r2");
    r.weight = get_or_nan(row, "weight");
    r.satisfied = row.contains("satisfied") && row.at("satisfied").get<bool>();
    r.skipped = row.contains("skipped") && row.at("skipped").get<bool>();
    if (row.contains("note")) r.note = row.at("note").get<std::string>();
    report.rows.push_back(std::move(r));
  }
  for (const ReportRow& r : report.rows) {
    if (r.skipped)
      ++report.skipped_count;
    else if (r.satisfied)
      ++report.satisfied_count;
    else
      ++report.violated_count;
  }
  if (j.contains("provenance")) {
    const json& p = j.at("provenance");
    if (p.contains("config_hash")) {
      const json& h = p.at("config_hash");
      report.config_hash = h.is_string() ? std::stoull(h.get<std::string>(), nullptr, 16)
                                         : h.get<std::uint64_t>();
    }
    if (p.contains("tool_version")) report.tool_version = p.at("tool_version").get<std::string>();
    if (p.contains("generated_at")) report.generated_at = p.at("generated_at").get<std::string>();
  }
  return report;
}

VerificationReport load_report_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open report file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ValidationError("cannot parse '" + path + "': " + e.what());
  }
  return report_from_json(j);
}

void write_report(const VerificationReport& report, const std::string& path,
                  const std::string& format) {
  std::string fmt = format;
  if (fmt.empty()) {
    const auto dot = path.rfind('.');
    fmt = (dot != std::string::npos && path.substr(dot) == ".json") ? "json" : "csv";
  }
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open output file '" + path + "'");
  if (fmt == "json")
    out << report_to_json(report).dump(2) << "\n";
  else if (fmt == "csv")
    out << report_csv(report);
  else
    throw ValidationError("unknown report format '" + fmt + "'");
}

}  // namespace lightcone
