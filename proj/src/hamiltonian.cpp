// Copyright 2026 The Lightcone Authors
// SPDX-License-Identifier: Apache-2.0
#include "lightcone/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lightcone/errors.hpp"
#include "lightcone/operator_catalog.hpp"

namespace lightcone {

using nlohmann::json;

std::string to_string(SiteKind kind) {
  return kind == SiteKind::System ? "system" : "environment";
}

SiteKind site_kind_from_string(const std::string& s) {
  if (s == "system") return SiteKind::System;
  if (s == "environment") return SiteKind::Environment;
  throw ValidationError("site kind must be 'system' or 'environment', got '" + s + "'");
}

int HamiltonianSpec::site_index(int id) const {
  for (std::size_t k = 0; k < sites.size(); ++k)
    if (sites[k].id == id) return int(k);
  return -1;
}

int HamiltonianSpec::dim_of(int id) const {
  int k = site_index(id);
  if (k < 0) throw ValidationError("unknown site id " + std::to_string(id));
  return sites[k].dim;
}

bool HamiltonianSpec::is_system(int id) const {
  return std::find(system_ids.begin(), system_ids.end(), id) != system_ids.end();
}

std::int64_t HamiltonianSpec::total_dim(std::int64_t cap) const {
  std::int64_t d = 1;
  for (const auto& s : sites) {
    d *= s.dim;
    if (cap > 0 && d > cap)
      throw ResourceError("total Hilbert-space dimension exceeds cap " + std::to_string(cap));
    if (d < 0 || d > (std::int64_t(1) << 40))
      throw ResourceError("total Hilbert-space dimension overflows any dense representation");
  }
  return d;
}

void validate_spec(const HamiltonianSpec& spec) {
  if (spec.sites.empty()) throw ValidationError("spec has no sites");
  std::set<int> ids;
  for (const auto& s : spec.sites) {
    if (s.id < 0) throw ValidationError("site id must be nonnegative, got " + std::to_string(s.id));
    if (s.dim < 2)
      throw ValidationError("site " + std::to_string(s.id) + " has dimension < 2");
    if (!ids.insert(s.id).second)
      throw ValidationError("duplicate site id " + std::to_string(s.id));
  }
  if (spec.system_ids.empty()) throw ValidationError("spec has no system sites");
  std::set<int> sys(spec.system_ids.begin(), spec.system_ids.end());
  if (sys.size() != spec.system_ids.size())
    throw ValidationError("duplicate id in system_ids");
  for (int id : spec.system_ids)
    if (!ids.count(id))
      throw ValidationError("system_ids references unknown site " + std::to_string(id));
  for (const auto& s : spec.sites) {
    const bool in_sys = sys.count(s.id) > 0;
    if (in_sys != (s.kind == SiteKind::System))
      throw ValidationError("site " + std::to_string(s.id) +
                            ": kind disagrees with system_ids membership");
  }
  for (std::size_t t = 0; t < spec.terms.size(); ++t) {
    const auto& term = spec.terms[t];
    const std::string where = "term " + std::to_string(t);
    if (term.sites.empty()) throw ValidationError(where + " has no sites");
    if (term.sites.size() != term.ops.size())
      throw ValidationError(where + ": sites/ops length mismatch");
    std::set<int> seen;
    for (std::size_t k = 0; k < term.sites.size(); ++k) {
      int id = term.sites[k];
      if (!ids.count(id))
        throw ValidationError(where + " references unknown site " + std::to_string(id));
      if (!seen.insert(id).second)
        throw ValidationError(where + " repeats site " + std::to_string(id));
      int dim = spec.dim_of(id);
      if (!catalog_has(term.ops[k], dim))
        throw ValidationError(where + ": operator '" + term.ops[k] +
                              "' incompatible with site " + std::to_string(id) + " (dim " +
                              std::to_string(dim) + ")");
    }
    if (!std::isfinite(term.coeff)) throw ValidationError(where + " has non-finite coefficient");
  }
}

namespace {

void reject_unknown_fields(const json& j, const std::set<std::string>& allowed,
                           const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + ": expected a JSON object");
  for (const auto& item : j.items())
    if (!allowed.count(item.key()))
      throw ValidationError(where + ": unknown field '" + item.key() + "'");
}

int require_int(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ValidationError(where + ": missing field '" + key + "'");
  if (!j.at(key).is_number_integer())
    throw ValidationError(where + ": field '" + key + "' must be an integer");
  return j.at(key).get<int>();
}

}  // namespace

HamiltonianSpec spec_from_json(const json& j) {
  reject_unknown_fields(j, {"sites", "terms", "system_ids"}, "spec");
  for (const char* key : {"sites", "terms", "system_ids"})
    if (!j.contains(key)) throw ValidationError(std::string("spec: missing field '") + key + "'");
  HamiltonianSpec spec;
  if (!j.at("sites").is_array()) throw ValidationError("spec: 'sites' must be an array");
  for (const auto& js : j.at("sites")) {
    reject_unknown_fields(js, {"id", "dim", "kind"}, "site");
    SiteSpec s;
    s.id = require_int(js, "id", "site");
    s.dim = require_int(js, "dim", "site");
    if (!js.contains("kind") || !js.at("kind").is_string())
      throw ValidationError("site: missing or non-string field 'kind'");
    s.kind = site_kind_from_string(js.at("kind").get<std::string>());
    spec.sites.push_back(s);
  }
  if (!j.at("terms").is_array()) throw ValidationError("spec: 'terms' must be an array");
  for (const auto& jt : j.at("terms")) {
    reject_unknown_fields(jt, {"sites", "ops", "coeff"}, "term");
    InteractionTerm t;
    if (!jt.contains("sites") || !jt.at("sites").is_array())
      throw ValidationError("term: missing or non-array field 'sites'");
    for (const auto& v : jt.at("sites")) {
      if (!v.is_number_integer()) throw ValidationError("term: site ids must be integers");
      t.sites.push_back(v.get<int>());
    }
    if (!jt.contains("ops") || !jt.at("ops").is_array())
      throw ValidationError("term: missing or non-array field 'ops'");
    for (const auto& v : jt.at("ops")) {
      if (!v.is_string()) throw ValidationError("term: ops must be strings");
      t.ops.push_back(v.get<std::string>());
    }
    if (!jt.contains("coeff") || !jt.at("coeff").is_number())
      throw ValidationError("term: missing or non-numeric field 'coeff'");
    t.coeff = jt.at("coeff").get<double>();
    spec.terms.push_back(std::move(t));
  }
  if (!j.at("system_ids").is_array()) throw ValidationError("spec: 'system_ids' must be an array");
  for (const auto& v : j.at("system_ids")) {
    if (!v.is_number_integer()) throw ValidationError("spec: system_ids must be integers");
    spec.system_ids.push_back(v.get<int>());
  }
  validate_spec(spec);
  return spec;
}

json spec_to_json(const HamiltonianSpec& spec) {
  json j;
  j["sites"] = json::array();
  for (const auto& s : spec.sites)
    j["sites"].push_back({{"id", s.id}, {"dim", s.dim}, {"kind", to_string(s.kind)}});
  j["terms"] = json::array();
  for (const auto& t : spec.terms)
    j["terms"].push_back({{"sites", t.sites}, {"ops", t.ops}, {"coeff", t.coeff}});
  j["system_ids"] = spec.system_ids;
  return j;
}

HamiltonianSpec load_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open spec file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ValidationError("cannot parse '" + path + "': " + e.what());
  }
  return spec_from_json(j);
}

void save_spec_file(const HamiltonianSpec& spec, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open output file '" + path + "'");
  out << spec_to_json(spec).dump(2) << "\n";
}

double op_norm_max(const HamiltonianSpec& spec) {
  double best = 0.0;
  for (const auto& t : spec.terms) {
    double prod = 1.0;
    for (std::size_t k = 0; k < t.sites.size(); ++k)
      prod *= local_operator_norm(t.ops[k], spec.dim_of(t.sites[k]));
    best = std::max(best, prod);
  }
  return best;
}

std::pair<HamiltonianSpec, double> rescale_spec(const HamiltonianSpec& spec, double r) {
  if (!(r > 0.0)) throw ValidationError("rescale factor must be positive");
  HamiltonianSpec out = spec;
  for (auto& t : out.terms) t.coeff /= r;
  return {std::move(out), r};
}

}  // namespace lightcone
