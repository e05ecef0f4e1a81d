// Copyright 2026 The Lightcone Authors
// SPDX-License-Identifier: Apache-2.0
//
// lightcone: build surrogate generators for open-system dynamics, evaluate
// a-priori truncation bounds, and verify them against dense evolution.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "lightcone/continuum.hpp"
#include "lightcone/coupling_graph.hpp"
#include "lightcone/dense_operator.hpp"
#include "lightcone/errors.hpp"
#include "lightcone/hamiltonian.hpp"
#include "lightcone/layers.hpp"
#include "lightcone/operator_catalog.hpp"
#include "lightcone/scan.hpp"

namespace {

using nlohmann::json;
using namespace lightcone;

struct CommonOpts {
  std::int64_t cap = 0;
  std::string out;
  std::string format;
  std::uint64_t seed = 0;
  bool cap_given = false;
  bool seed_given = false;
};

void add_common(CLI::App* sub, CommonOpts& c) {
  sub->add_option("--cap", c.cap, "Hilbert-space budget (product of local dimensions)")
      ->envname("LIGHTCONE_CAP")
      ->each([&c](const std::string&) { c.cap_given = true; });
  sub->add_option("--out", c.out, "write the result to this path instead of stdout");
  sub->add_option("--format", c.format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--seed", c.seed, "seed for randomized models")
      ->each([&c](const std::string&) { c.seed_given = true; });
}

Observable parse_observable(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 >= text.size())
    throw ValidationError("observable must be written as <site>:<op>, e.g. 0:sz");
  Observable obs;
  try {
    obs.site = std::stoi(text.substr(0, colon));
  } catch (const std::exception&) {
    throw ValidationError("observable site must be an integer");
  }
  obs.op = text.substr(colon + 1);
  return obs;
}

void emit(const json& j, const CommonOpts& c) {
  std::string text;
  if (c.format == "csv") {
    for (const auto& item : j.items()) {
      if (item.value().is_structured())
        text += item.key() + "," + item.value().dump() + "\n";
      else if (item.value().is_string())
        text += item.key() + "," + item.value().get<std::string>() + "\n";
      else
        text += item.key() + "," + item.value().dump() + "\n";
    }
  } else {
    text = j.dump(2) + "\n";
  }
  if (c.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(c.out);
    if (!f) throw ValidationError("cannot open output file '" + c.out + "'");
    f << text;
  }
}

int run_graph_analyze(const std::string& path, const CommonOpts& c) {
  const HamiltonianSpec spec = load_spec_file(path);
  const CouplingGraph g = build_graph(spec);
  const auto dists = distances_from_system(g);
  int depth = 0;
  int unreachable = 0;
  for (const auto& d : dists) {
    if (d)
      depth = std::max(depth, *d);
    else
      ++unreachable;
  }
  const SystemBathWeight w = system_bath_weight(g, depth);
  json out;
  out["nodes"] = g.size();
  out["hyperedges"] = g.hyperedges.size();
  out["system_sites"] = g.system_indices.size();
  out["max_connectivity"] = max_connectivity(g);
  out["coupling_norm"] = coupling_norm(g);
  out["depth"] = depth;
  out["unreachable_nodes"] = unreachable;
  out["system_bath_weight"] = w.partial_sum;
  out["weight_diverging"] = w.diverging;
  emit(out, c);
  return 0;
}

int run_bound_lr(const std::string& path, double t, double eps, double mu,
                 const std::optional<std::string>& obs_text, const CommonOpts& c) {
  const HamiltonianSpec spec = load_spec_file(path);
  const CouplingGraph g = build_graph(spec);
  double a_norm = 1.0;
  if (obs_text) {
    const Observable obs = parse_observable(*obs_text);
    a_norm = local_operator_norm(obs.op, spec.dim_of(obs.site));
  }
  const LRBoundParams params = make_lr_params(g, op_norm_max(spec), a_norm, 1, mu);
  const int n = min_layers(params, t, eps);
  const LayerDecomposition ld = layer_partition(spec, g);
  json out;
  out["t"] = t;
  out["epsilon"] = eps;
  out["mu"] = mu;
  out["op_norm"] = params.op_norm;
  out["a_norm"] = params.a_norm;
  out["velocity"] = params.velocity;
  out["min_layers"] = n;
  out["bound_closed_form"] = lr_error_bound(params, n, t);
  out["bound_exact_series"] = remainder_bound_exact(g, params.op_norm, params.a_norm, n, t);
  out["saturated"] = truncation_saturated(ld, n);
  emit(out, c);
  return 0;
}

int run_truncate(const std::string& path, int n, const CommonOpts& c) {
  const HamiltonianSpec spec = load_spec_file(path);
  const CouplingGraph g = build_graph(spec);
  const LayerDecomposition ld = layer_partition(spec, g);
  emit(spec_to_json(truncate_generator(ld, n)), c);
  return 0;
}

int run_surrogate_build(const std::string& path, int n, const CommonOpts& c) {
  const ContinuumBathSpec bath = load_bath_file(path);
  const Partition p = make_partition(bath.x_max, n);
  emit(spec_to_json(build_surrogate(bath, p)), c);
  return 0;
}

int run_evolve(const std::string& path, double t, const std::string& obs_text,
               const CommonOpts& c) {
  const HamiltonianSpec spec = load_spec_file(path);
  const Observable obs = parse_observable(obs_text);
  const std::int64_t cap = c.cap_given && c.cap > 0 ? c.cap : kDefaultDimCap;
  const DenseOperator h = assemble_operator(spec, cap);
  std::vector<SiteSpec> frame = spec.sites;
  const DenseOperator a = embed_operator(make_site_operator(spec, obs.site, obs.op), frame, cap);
  DenseOperator a_t = a;
  a_t.matrix = evolve_heisenberg(h.matrix, a.matrix, t);
  a_t.label = obs.op + "(t=" + std::to_string(t) + ") on site " + std::to_string(obs.site);
  json out;
  out["t"] = t;
  out["dim"] = a_t.dim();
  out["observable_norm"] = spectral_norm(a_t.matrix);
  out["displacement_norm"] = spectral_norm((a_t.matrix - a.matrix).eval());
  if (!c.out.empty()) {
    save_operator(a_t, c.out);
    out["saved_to"] = c.out;
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << out.dump(2) << "\n";
  }
  return 0;
}

int run_scan(const std::string& path, const CommonOpts& c) {
  ExperimentConfig config = load_config_file(path);
  if (c.cap_given) config.cap = c.cap;
  if (c.seed_given) config.seed = c.seed;
  if (!c.out.empty()) config.output_path.clear();  // CLI --out takes over the write
  const VerificationReport report = run_experiment(config);
  if (!c.out.empty()) {
    write_report(report, c.out, c.format);
  } else if (config.output_path.empty()) {
    std::cout << (c.format == "json" ? report_to_json(report).dump(2) + "\n"
                                     : report_csv(report));
  }
  const Verdict verdict = verify_bounds(report);
  if (verdict == Verdict::Violation)
    std::cerr << "bound violated on " << violating_rows(report).size() << " row(s)\n";
  if (verdict == Verdict::Indeterminate) std::cerr << "no row produced a checkable result\n";
  return int(verdict);
}

int run_verify(const std::string& path) {
  const VerificationReport report = load_report_file(path);
  const Verdict verdict = verify_bounds(report);
  if (verdict == Verdict::Success) {
    std::cout << "ok: " << report.satisfied_count << " row(s) satisfied, "
              << report.skipped_count << " skipped\n";
  } else if (verdict == Verdict::Indeterminate) {
    std::cout << "indeterminate: every row was skipped\n";
  } else {
    std::cout << "violation: " << report.violated_count << " row(s) exceed their bound\n";
    for (int k : violating_rows(report)) {
      const ReportRow& r = report.rows[std::size_t(k)];
      std::cout << "  row " << k << ": t=" << r.t << " n=" << r.n
                << " bound_closed=" << r.bound_closed << " bound_exact=" << r.bound_exact
                << " empirical=" << r.empirical << "\n";
    }
  }
  return int(verdict);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"surrogate generators and a-priori error bounds for open-system dynamics"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  CommonOpts common;

  // graph analyze <spec.json>
  auto* graph = app.add_subcommand("graph", "coupling-graph analysis");
  graph->require_subcommand(1);
  auto* analyze = graph->add_subcommand("analyze", "summarize the coupling graph of a spec");
  std::string analyze_path;
  analyze->add_option("spec", analyze_path, "Hamiltonian spec (JSON)")->required();
  add_common(analyze, common);

  // bound lr <spec.json> --t --eps [--mu] [--observable]
  auto* bound = app.add_subcommand("bound", "a-priori truncation bounds");
  bound->require_subcommand(1);
  auto* lr = bound->add_subcommand("lr", "closed-form and exact-series layer bounds");
  std::string lr_path;
  double lr_t = 0.0, lr_eps = 0.0, lr_mu = 1.0;
  std::optional<std::string> lr_obs;
  lr->add_option("spec", lr_path, "Hamiltonian spec (JSON)")->required();
  lr->add_option("--t", lr_t, "evolution time")->required();
  lr->add_option("--eps", lr_eps, "target accuracy")->required();
  lr->add_option("--mu", lr_mu, "decay-rate parameter");
  lr->add_option("--observable", lr_obs, "observable as <site>:<op> (default norm 1)");
  add_common(lr, common);

  // truncate <spec.json> --n
  auto* truncate = app.add_subcommand("truncate", "emit the n-layer truncated generator");
  std::string trunc_path;
  int trunc_n = 1;
  truncate->add_option("spec", trunc_path, "Hamiltonian spec (JSON)")->required();
  truncate->add_option("--n", trunc_n, "number of layers to keep")->required();
  add_common(truncate, common);

  // surrogate build <bath.json> --n
  auto* surrogate = app.add_subcommand("surrogate", "continuum-bath surrogates");
  surrogate->require_subcommand(1);
  auto* build = surrogate->add_subcommand("build", "discretize a bath on a uniform partition");
  std::string bath_path;
  int bath_n = 1;
  build->add_option("bath", bath_path, "continuum bath (JSON)")->required();
  build->add_option("--n", bath_n, "partition resolution")->required();
  add_common(build, common);

  // evolve <spec.json> --t --observable
  auto* evolve = app.add_subcommand("evolve", "dense Heisenberg evolution of an observable");
  std::string evolve_path, evolve_obs;
  double evolve_t = 0.0;
  evolve->add_option("spec", evolve_path, "Hamiltonian spec (JSON)")->required();
  evolve->add_option("--t", evolve_t, "evolution time")->required();
  evolve->add_option("--observable", evolve_obs, "observable as <site>:<op>")->required();
  add_common(evolve, common);

  // scan <config.json>
  auto* scan = app.add_subcommand("scan", "run a bound/error scan from a config");
  std::string scan_path;
  scan->add_option("config", scan_path, "experiment config (JSON)")->required();
  add_common(scan, common);

  // verify <report.json>
  auto* verify = app.add_subcommand("verify", "check bound dominance in a report");
  std::string verify_path;
  verify->add_option("report", verify_path, "report (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 4;
  }

  try {
    if (analyze->parsed()) return run_graph_analyze(analyze_path, common);
    if (lr->parsed()) return run_bound_lr(lr_path, lr_t, lr_eps, lr_mu, lr_obs, common);
    if (truncate->parsed()) return run_truncate(trunc_path, trunc_n, common);
    if (build->parsed()) return run_surrogate_build(bath_path, bath_n, common);
    if (evolve->parsed()) return run_evolve(evolve_path, evolve_t, evolve_obs, common);
    if (scan->parsed()) return run_scan(scan_path, common);
    if (verify->parsed()) return run_verify(verify_path);
  } catch (const ValidationError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 4;
  } catch (const ResourceError& e) {
    std::cerr << "resource error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
