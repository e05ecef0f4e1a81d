// Copyright 2026 The Lightcone Authors
// SPDX-License-Identifier: Apache-2.0
#include "lightcone/continuum.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <set>

#include <nlohmann/json.hpp>

#include "lightcone/errors.hpp"
#include "lightcone/operator_catalog.hpp"

namespace lightcone {

using nlohmann::json;

// ---------------------------------------------------------------------------
// CouplingFunction

CouplingFunction CouplingFunction::constant(double value) {
  CouplingFunction f;
  f.form_ = Form::Const;
  f.a_ = value;
  return f;
}

CouplingFunction CouplingFunction::linear(double slope) {
  CouplingFunction f;
  f.form_ = Form::Linear;
  f.a_ = slope;
  return f;
}

CouplingFunction CouplingFunction::exponential(double amp, double rate) {
  CouplingFunction f;
  f.form_ = Form::Exp;
  f.a_ = amp;
  f.b_ = rate;
  return f;
}

CouplingFunction CouplingFunction::table(std::vector<std::pair<double, double>> points) {
  if (points.size() < 2) throw ValidationError("table coupling needs at least two points");
  for (std::size_t k = 1; k < points.size(); ++k)
    if (!(points[k].first > points[k - 1].first))
      throw ValidationError("table coupling abscissae must be strictly increasing");
  CouplingFunction f;
  f.form_ = Form::Table;
  f.pts_ = std::move(points);
  return f;
}

double CouplingFunction::operator()(double x) const {
  switch (form_) {
    case Form::Const:
      return a_;
    case Form::Linear:
      return a_ * x;
    case Form::Exp:
      return a_ * std::exp(-b_ * x);
    case Form::Table: {
      if (x <= pts_.front().first) return pts_.front().second;
      if (x >= pts_.back().first) return pts_.back().second;
      auto hi = std::upper_bound(pts_.begin(), pts_.end(), x,
                                 [](double v, const auto& p) { return v < p.first; });
      auto lo = hi - 1;
      const double w = (x - lo->first) / (hi->first - lo->first);
      return lo->second + w * (hi->second - lo->second);
    }
  }
  return 0.0;
}

CouplingFunction CouplingFunction::from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("coupling: expected a JSON object");
  if (!j.contains("form") || !j.at("form").is_string())
    throw ValidationError("coupling: missing string field 'form'");
  const std::string form = j.at("form").get<std::string>();
  const auto check = [&](std::set<std::string> allowed) {
    allowed.insert("form");
    for (const auto& item : j.items())
      if (!allowed.count(item.key()))
        throw ValidationError("coupling: unknown field '" + item.key() + "' for form '" + form +
                              "'");
  };
  const auto num = [&](const char* key) {
    if (!j.contains(key) || !j.at(key).is_number())
      throw ValidationError(std::string("coupling: missing numeric field '") + key + "'");
    return j.at(key).get<double>();
  };
  if (form == "const") {
    check({"value"});
    return constant(num("value"));
  }
  if (form == "linear") {
    check({"slope"});
    return linear(num("slope"));
  }
  if (form == "exp") {
    check({"amp", "rate"});
    return exponential(num("amp"), num("rate"));
  }
  if (form == "table") {
    check({"points"});
    if (!j.contains("points") || !j.at("points").is_array())
      throw ValidationError("coupling: table form needs an array field 'points'");
    std::vector<std::pair<double, double>> pts;
    for (const auto& p : j.at("points")) {
      if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
        throw ValidationError("coupling: table points must be [x, value] pairs");
      pts.emplace_back(p[0].get<double>(), p[1].get<double>());
    }
    return table(std::move(pts));
  }
  throw ValidationError("coupling: unknown form '" + form + "'");
}

json CouplingFunction::to_json() const {
  switch (form_) {
    case Form::Const:
      return {{"form", "const"}, {"value", a_}};
    case Form::Linear:
      return {{"form", "linear"}, {"slope", a_}};
    case Form::Exp:
      return {{"form", "exp"}, {"amp", a_}, {"rate", b_}};
    case Form::Table: {
      json pts = json::array();
      for (const auto& p : pts_) pts.push_back({p.first, p.second});
      return {{"form", "table"}, {"points", pts}};
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// Bath spec

void validate_bath(const ContinuumBathSpec& bath) {
  if (!(bath.x_max > 0.0)) throw ValidationError("bath: x_max must be positive");
  if (bath.boson_levels < 2) throw ValidationError("bath: boson_levels must be >= 2");
  validate_spec(bath.system);
  for (const auto& s : bath.system.sites)
    if (s.kind != SiteKind::System)
      throw ValidationError("bath: every site of the system block must have kind 'system'");
  const int idx = bath.system.site_index(bath.system_op_site);
  if (idx < 0) throw ValidationError("bath: system_op site is not part of the system block");
  if (!catalog_has(bath.system_op, bath.system.sites[std::size_t(idx)].dim))
    throw ValidationError("bath: system_op '" + bath.system_op +
                          "' incompatible with its site dimension");
}

ContinuumBathSpec bath_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("bath: expected a JSON object");
  const std::set<std::string> allowed = {"x_max", "J",      "K",  "g",
                                         "boson_levels", "system", "system_op"};
  for (const auto& item : j.items())
    if (!allowed.count(item.key()))
      throw ValidationError("bath: unknown field '" + item.key() + "'");
  for (const char* key : {"x_max", "J", "K", "g", "boson_levels", "system", "system_op"})
    if (!j.contains(key)) throw ValidationError(std::string("bath: missing field '") + key + "'");
  ContinuumBathSpec bath;
  if (!j.at("x_max").is_number()) throw ValidationError("bath: x_max must be a number");
  bath.x_max = j.at("x_max").get<double>();
  bath.J = CouplingFunction::from_json(j.at("J"));
  bath.K = CouplingFunction::from_json(j.at("K"));
  bath.g = CouplingFunction::from_json(j.at("g"));
  if (!j.at("boson_levels").is_number_integer())
    throw ValidationError("bath: boson_levels must be an integer");
  bath.boson_levels = j.at("boson_levels").get<int>();
  bath.system = spec_from_json(j.at("system"));
  const auto& op = j.at("system_op");
  if (!op.is_object() || !op.contains("site") || !op.contains("op"))
    throw ValidationError("bath: system_op must be {\"site\": id, \"op\": name}");
  for (const auto& item : op.items())
    if (item.key() != "site" && item.key() != "op")
      throw ValidationError("bath: system_op: unknown field '" + item.key() + "'");
  if (!op.at("site").is_number_integer() || !op.at("op").is_string())
    throw ValidationError("bath: system_op fields have wrong types");
  bath.system_op_site = op.at("site").get<int>();
  bath.system_op = op.at("op").get<std::string>();
  validate_bath(bath);
  return bath;
}

json bath_to_json(const ContinuumBathSpec& bath) {
  json j;
  j["x_max"] = bath.x_max;
  j["J"] = bath.J.to_json();
  j["K"] = bath.K.to_json();
  j["g"] = bath.g.to_json();
  j["boson_levels"] = bath.boson_levels;
  j["system"] = spec_to_json(bath.system);
  j["system_op"] = {{"site", bath.system_op_site}, {"op", bath.system_op}};
  return j;
}

ContinuumBathSpec load_bath_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open bath file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ValidationError("cannot parse '" + path + "': " + e.what());
  }
  return bath_from_json(j);
}

// ---------------------------------------------------------------------------
// Partition

double Partition::norm() const {
  double m = 0.0;
  for (double w : widths) m = std::max(m, w);
  return m;
}

void validate_partition(const Partition& p) {
  if (p.points.empty()) throw ValidationError("partition: no points");
  if (!(p.x_max > 0.0)) throw ValidationError("partition: x_max must be positive");
  if (p.points.size() != p.widths.size())
    throw ValidationError("partition: points/widths length mismatch");
  double sum = 0.0;
  for (std::size_t k = 0; k < p.points.size(); ++k) {
    if (k > 0 && !(p.points[k] > p.points[k - 1]))
      throw ValidationError("partition: points must be strictly increasing");
    if (!(p.widths[k] > 0.0)) throw ValidationError("partition: widths must be positive");
    if (p.points[k] < 0.0 || p.points[k] >= p.x_max)
      throw ValidationError("partition: points must lie in [0, x_max)");
    if (k + 1 < p.points.size() &&
        std::abs(p.points[k] + p.widths[k] - p.points[k + 1]) > 1e-12 * p.x_max)
      throw ValidationError("partition: cells must tile the interval");
    sum += p.widths[k];
  }
  if (std::abs(sum - (p.x_max - p.points.front())) > 1e-9 * p.x_max)
    throw ValidationError("partition: widths must sum to x_max - points[0]");
}

Partition make_partition(double x_max, int n) {
  if (n < 1) throw ValidationError("make_partition: n must be >= 1");
  if (!(x_max > 0.0)) throw ValidationError("make_partition: x_max must be positive");
  Partition p;
  p.x_max = x_max;
  const double w = x_max / double(n);
  for (int i = 0; i < n; ++i) {
    p.points.push_back(double(i) * w);
    p.widths.push_back(w);
  }
  return p;
}

Partition partition_from_points(double x_max, std::vector<double> points) {
  Partition p;
  p.x_max = x_max;
  p.points = std::move(points);
  for (std::size_t k = 0; k < p.points.size(); ++k) {
    const double next = (k + 1 < p.points.size()) ? p.points[k + 1] : x_max;
    p.widths.push_back(next - p.points[k]);
  }
  validate_partition(p);
  return p;
}

// ---------------------------------------------------------------------------
// Surrogate construction

namespace {

std::vector<int> match_slots(const Partition& p_test, const Partition& reference) {
  const double tol = 1e-9 * reference.x_max;
  std::vector<int> slots;
  for (double x : p_test.points) {
    int found = -1;
    for (int k = 0; k < reference.size(); ++k)
      if (std::abs(reference.points[std::size_t(k)] - x) <= tol) {
        found = k;
        break;
      }
    if (found < 0)
      throw ValidationError("partition point " + std::to_string(x) +
                            " has no counterpart in the reference partition");
    slots.push_back(found);
  }
  return slots;
}

HamiltonianSpec build_surrogate_impl(const ContinuumBathSpec& bath, const Partition& p,
                                     const std::vector<int>& slots) {
  validate_bath(bath);
  validate_partition(p);
  HamiltonianSpec spec = bath.system;
  int base = 0;
  for (const auto& s : spec.sites) base = std::max(base, s.id + 1);
  const int n = p.size();
  std::vector<int> mode_ids(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    mode_ids[std::size_t(i)] = base + slots[std::size_t(i)];
    spec.sites.push_back({mode_ids[std::size_t(i)], bath.boson_levels, SiteKind::Environment});
  }
  // Terms with exactly zero coefficient are dropped: the kernel-free bath
  // stays a star graph around the system.
  const int op_site = bath.system_op_site;
  for (int i = 0; i < n; ++i) {
    const double jt = bath.J(p.points[std::size_t(i)]) * p.widths[std::size_t(i)];
    if (jt == 0.0) continue;
    spec.terms.push_back({{op_site, mode_ids[std::size_t(i)]}, {bath.system_op, "a"}, jt});
    spec.terms.push_back({{op_site, mode_ids[std::size_t(i)]}, {bath.system_op, "adag"}, jt});
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double kt = 2.0 * bath.K(std::abs(p.points[std::size_t(i)] - p.points[std::size_t(j)])) *
                        p.widths[std::size_t(i)] * p.widths[std::size_t(j)];
      if (kt == 0.0) continue;
      spec.terms.push_back({{mode_ids[std::size_t(i)], mode_ids[std::size_t(j)]}, {"adag", "a"}, kt});
      spec.terms.push_back({{mode_ids[std::size_t(i)], mode_ids[std::size_t(j)]}, {"a", "adag"}, kt});
      spec.terms.push_back({{mode_ids[std::size_t(i)], mode_ids[std::size_t(j)]}, {"n", "n"}, kt});
    }
  for (int i = 0; i < n; ++i) {
    const double gt = bath.g(p.points[std::size_t(i)]) * p.widths[std::size_t(i)];
    if (gt == 0.0) continue;
    spec.terms.push_back({{mode_ids[std::size_t(i)]}, {"n"}, gt});
  }
  validate_spec(spec);
  return spec;
}

}  // namespace

HamiltonianSpec build_surrogate(const ContinuumBathSpec& bath, const Partition& p) {
  std::vector<int> slots(std::size_t(p.size()));
  for (int i = 0; i < p.size(); ++i) slots[std::size_t(i)] = i;
  return build_surrogate_impl(bath, p, slots);
}

HamiltonianSpec build_surrogate_on_slots(const ContinuumBathSpec& bath, const Partition& p_test,
                                         const Partition& reference) {
  return build_surrogate_impl(bath, p_test, match_slots(p_test, reference));
}

double partition_weight(const ContinuumBathSpec& bath, const Partition& p) {
  validate_partition(p);
  double sum = 0.0;
  for (int i = 0; i < p.size(); ++i)
    sum += bath.J(p.points[std::size_t(i)]) * p.widths[std::size_t(i)];
  return sum;
}

// ---------------------------------------------------------------------------
// Scalar remainder estimators

namespace {

constexpr double kSafety = 1.25;

int per_cell_samples(const Partition& p, int derivative_grid) {
  const int n = p.size();
  if (derivative_grid == 0) derivative_grid = std::max(10 * n, 4000);
  if (derivative_grid < 10 * n)
    throw ValidationError("derivative_grid must be at least 10 per partition point");
  return std::max(10, derivative_grid / n);
}

// Max |f'| over [lo, hi] from forward differences on m samples.
double sup_abs_derivative(const std::function<double(double)>& f, double lo, double hi, int m) {
  if (!(hi > lo)) return 0.0;
  const double h = (hi - lo) / double(m - 1);
  double prev = f(lo);
  double best = 0.0;
  for (int k = 1; k < m; ++k) {
    const double cur = f(lo + double(k) * h);
    best = std::max(best, std::abs(cur - prev) / h);
    prev = cur;
  }
  return best;
}

// Max |f| over [lo, hi] from m samples.
double sup_abs_value(const std::function<double(double)>& f, double lo, double hi, int m) {
  double best = 0.0;
  for (int k = 0; k < m; ++k) {
    const double x = lo + (hi - lo) * double(k) / double(m - 1);
    best = std::max(best, std::abs(f(x)));
  }
  return best;
}

// Range of |x - x0| as x runs over [a, b].
std::pair<double, double> abs_range(double a, double b, double x0) {
  const double lo = a - x0, hi = b - x0;
  if (lo >= 0.0) return {lo, hi};
  if (hi <= 0.0) return {-hi, -lo};
  return {0.0, std::max(-lo, hi)};
}

}  // namespace

double riemann_remainder(const std::function<double(double)>& f, const Partition& p,
                         int derivative_grid) {
  validate_partition(p);
  const int m = per_cell_samples(p, derivative_grid);
  double sum = 0.0;
  for (int i = 0; i < p.size(); ++i) {
    const double x = p.points[std::size_t(i)];
    const double w = p.widths[std::size_t(i)];
    sum += 0.5 * w * w * sup_abs_derivative(f, x, x + w, m) * kSafety;
  }
  return sum;
}

double riemann_gap_vs_reference(const std::function<double(double)>& f, const Partition& p,
                                const Partition& reference) {
  validate_partition(p);
  validate_partition(reference);
  const std::vector<int> slots = match_slots(p, reference);
  double sum = 0.0;
  for (int i = 0; i < p.size(); ++i) {
    const int lo = slots[std::size_t(i)];
    const int hi = (i + 1 < p.size()) ? slots[std::size_t(i) + 1] : reference.size();
    double fine = 0.0;
    for (int k = lo; k < hi; ++k)
      fine += f(reference.points[std::size_t(k)]) * reference.widths[std::size_t(k)];
    sum += std::abs(fine - f(p.points[std::size_t(i)]) * p.widths[std::size_t(i)]);
  }
  return sum;
}

// ---------------------------------------------------------------------------
// Mode constants: exact norms of the small elementary operators entering the
// bound assembly, per boson truncation.

namespace {

struct ModeConstants {
  double c = 0.0;       // ||a||
  double x = 0.0;       // ||a + adag||
  double nn = 0.0;      // ||n||
  double w_factor = 0.0;  // 2||c||^2 + ||c||^4, per kernel bracket
  double e_xn = 0.0;    // ||[a + adag, n]||
  double w_jk = 0.0;    // ||[X, a]|| ||c|| + ||[X, adag]|| ||c|| + ||[X, n]|| ||c||^2
  double w_gk = 0.0;    // (||[adag, n]|| + ||[a, n]||) ||c||
  double e_xw = 0.0;    // max slot ||[X (x) 1, W]||
  double e_nw = 0.0;    // max slot ||[n (x) 1, W]||
  double e_ww = 0.0;    // ||[W (x) 1, 1 (x) W]|| on three modes
  double maxd5 = 0.0;   // max elementary factor of the kernel-kernel bracket
};

Eigen::MatrixXcd kron2(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

const ModeConstants& mode_constants(int b) {
  static std::map<int, ModeConstants> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(b);
  if (it != cache.end()) return it->second;

  const Eigen::MatrixXcd a = local_operator("a", b);
  const Eigen::MatrixXcd ad = local_operator("adag", b);
  const Eigen::MatrixXcd nn = local_operator("n", b);
  const Eigen::MatrixXcd x = a + ad;
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(b, b);
  const auto comm = [](const Eigen::MatrixXcd& p, const Eigen::MatrixXcd& q) {
    return (p * q - q * p).eval();
  };

  ModeConstants mc;
  mc.c = spectral_norm(a);
  mc.x = spectral_norm(x);
  mc.nn = spectral_norm(nn);
  mc.w_factor = 2.0 * mc.c * mc.c + mc.c * mc.c * mc.c * mc.c;
  mc.e_xn = spectral_norm(comm(x, nn));
  mc.w_jk = spectral_norm(comm(x, a)) * mc.c + spectral_norm(comm(x, ad)) * mc.c +
            mc.e_xn * mc.c * mc.c;
  mc.w_gk = (spectral_norm(comm(ad, nn)) + spectral_norm(comm(a, nn))) * mc.c;

  const Eigen::MatrixXcd w = kron2(ad, a) + kron2(a, ad) + kron2(nn, nn);
  mc.e_xw = std::max(spectral_norm(comm(kron2(x, id), w)), spectral_norm(comm(kron2(id, x), w)));
  mc.e_nw = std::max(spectral_norm(comm(kron2(nn, id), w)), spectral_norm(comm(kron2(id, nn), w)));
  const Eigen::MatrixXcd w12 = kron2(w, id);
  const Eigen::MatrixXcd w23 = kron2(id, w);
  mc.e_ww = spectral_norm(comm(w12, w23));

  const double k1 = spectral_norm(comm(ad, a));
  mc.maxd5 = std::max({2.0 * mc.c * mc.c * k1, 2.0 * mc.c * mc.c * mc.nn,
                       4.0 * mc.c * mc.c * mc.nn});

  return cache.emplace(b, mc).first->second;
}

// ||O_S|| and ||[H_S, O_S]|| on the bare system block.
std::pair<double, double> system_norms(const ContinuumBathSpec& bath) {
  const DenseOperator hs = assemble_operator(bath.system, 0);
  std::vector<SiteSpec> frame = bath.system.sites;
  const DenseOperator os =
      embed_operator(make_site_operator(bath.system, bath.system_op_site, bath.system_op), frame, 0);
  const double o_norm = local_operator_norm(bath.system_op, bath.system.dim_of(bath.system_op_site));
  const double comm_norm = spectral_norm((hs.matrix * os.matrix - os.matrix * hs.matrix).eval());
  return {o_norm, comm_norm};
}

}  // namespace

// ---------------------------------------------------------------------------
// A-priori bounds

ContinuumBoundReport commutator_norm_bound(const ContinuumBathSpec& bath, const Partition& p,
                                           int derivative_grid) {
  validate_bath(bath);
  validate_partition(p);
  const int m = per_cell_samples(p, derivative_grid);
  const ModeConstants& mc = mode_constants(bath.boson_levels);
  const auto [o_norm, sys_comm] = system_norms(bath);

  ContinuumBoundReport rep;
  rep.n = p.size();
  rep.norm_pn = p.norm();
  rep.o_s_norm = o_norm;
  rep.sys_comm_norm = sys_comm;

  const auto jf = [&](double x) { return bath.J(x); };
  rep.r_j = mc.x * riemann_remainder(jf, p, derivative_grid);

  const auto kf = [&](double u) { return bath.K(u); };
  const int n = p.size();
  double jk = 0.0, gk = 0.0, kk = 0.0;
  for (int j = 0; j < n; ++j) {
    const double xj = p.points[std::size_t(j)];
    const double wj = p.widths[std::size_t(j)];
    for (int i = 0; i < n; ++i) {
      if (i == j) continue;
      const double xi = p.points[std::size_t(i)];
      const double wi = p.widths[std::size_t(i)];
      const auto [ulo, uhi] = abs_range(xj, xj + wj, xi);
      const double supdk = sup_abs_derivative(kf, ulo, uhi, m);
      const double cellrem = 0.5 * wj * wj * supdk * kSafety;
      jk += wi * std::abs(bath.J(xi)) * cellrem;
      gk += wi * std::abs(bath.g(xi)) * cellrem;
      const double supk = sup_abs_value(kf, ulo, uhi, m) * kSafety;
      kk += wi * wj * (wj * supk) * std::abs(bath.K(std::abs(xi - xj)));
    }
  }
  rep.r_jk = mc.w_jk * jk;
  rep.r_gk = mc.w_gk * gk;
  rep.r_k = 5.0 * mc.maxd5 * kk;
  rep.r_b = o_norm * rep.r_jk + rep.r_gk + rep.r_k;
  rep.comm_norm_bound = 2.0 * (sys_comm * rep.r_j + rep.r_b);
  return rep;
}

double h_diff_norm_bound(const ContinuumBathSpec& bath, const Partition& p, int derivative_grid) {
  validate_bath(bath);
  validate_partition(p);
  const int m = per_cell_samples(p, derivative_grid);
  const ModeConstants& mc = mode_constants(bath.boson_levels);
  const auto [o_norm, sys_comm] = system_norms(bath);
  (void)sys_comm;

  const auto jf = [&](double x) { return bath.J(x); };
  const auto gf = [&](double x) { return bath.g(x); };
  const auto kf = [&](double u) { return bath.K(u); };

  const double rr_j = riemann_remainder(jf, p, derivative_grid);
  const double rr_g = riemann_remainder(gf, p, derivative_grid);

  // Tensorized 2-D left-corner remainder of K over the triangle x < x',
  // cell pairs (i < j), plus the uncovered diagonal strips.
  double rr_k2 = 0.0;
  const int n = p.size();
  for (int i = 0; i < n; ++i) {
    const double xi = p.points[std::size_t(i)];
    const double wi = p.widths[std::size_t(i)];
    for (int j = i + 1; j < n; ++j) {
      const double xj = p.points[std::size_t(j)];
      const double wj = p.widths[std::size_t(j)];
      const double lo = std::max(0.0, xj - (xi + wi));
      const double hi = xj + wj - xi;
      const double supdk = sup_abs_derivative(kf, lo, hi, m);
      rr_k2 += wi * wj * 0.5 * (wi + wj) * supdk * kSafety;
    }
    rr_k2 += 0.5 * wi * wi * sup_abs_value(kf, 0.0, wi, m) * kSafety;
  }

  return o_norm * 2.0 * mc.c * rr_j + 2.0 * mc.w_factor * rr_k2 + mc.c * mc.c * rr_g;
}

double r1_bound(const ContinuumBathSpec& bath, const Partition& p, double t, double a_norm) {
  const ContinuumBoundReport rep = commutator_norm_bound(bath, p);
  const double x = t * t * (rep.sys_comm_norm * rep.r_j + rep.r_b);
  return a_norm * x * (2.0 + x);
}

double r2_bound(double a_norm, double h_diff, double t) {
  const double expo = 2.0 * h_diff * t;
  if (expo > 700.0) return std::numeric_limits<double>::infinity();
  return a_norm * std::expm1(expo);
}

ContinuumBoundReport total_bound(const ContinuumBathSpec& bath, const Partition& p, double t,
                                 double a_norm) {
  if (t < 0.0) throw ValidationError("total_bound: t must be nonnegative");
  ContinuumBoundReport rep = commutator_norm_bound(bath, p);
  rep.t = t;
  rep.a_norm = a_norm;
  rep.h_diff_norm_bound = h_diff_norm_bound(bath, p);
  const double x = t * t * (rep.sys_comm_norm * rep.r_j + rep.r_b);
  rep.r1 = a_norm * x * (2.0 + x);
  rep.r2 = r2_bound(a_norm, rep.h_diff_norm_bound, t);
  rep.total = rep.r1 + rep.r2;
  return rep;
}

// ---------------------------------------------------------------------------
// Measured (reference-partition) bounds

ContinuumBoundReport reference_bound_report(const ContinuumBathSpec& bath, const Partition& p_test,
                                            const Partition& reference, double t, double a_norm) {
  validate_bath(bath);
  validate_partition(p_test);
  validate_partition(reference);
  if (t < 0.0) throw ValidationError("reference_bound_report: t must be nonnegative");
  const std::vector<int> slots = match_slots(p_test, reference);
  const ModeConstants& mc = mode_constants(bath.boson_levels);
  const auto [o_norm, sys_comm] = system_norms(bath);

  const int m = reference.size();
  std::vector<double> jr(static_cast<std::size_t>(m)), gr(static_cast<std::size_t>(m));
  std::vector<double> jt(static_cast<std::size_t>(m), 0.0), gt(static_cast<std::size_t>(m), 0.0);
  for (int k = 0; k < m; ++k) {
    jr[std::size_t(k)] = bath.J(reference.points[std::size_t(k)]) * reference.widths[std::size_t(k)];
    gr[std::size_t(k)] = bath.g(reference.points[std::size_t(k)]) * reference.widths[std::size_t(k)];
  }
  for (int i = 0; i < p_test.size(); ++i) {
    jt[std::size_t(slots[std::size_t(i)])] =
        bath.J(p_test.points[std::size_t(i)]) * p_test.widths[std::size_t(i)];
    gt[std::size_t(slots[std::size_t(i)])] =
        bath.g(p_test.points[std::size_t(i)]) * p_test.widths[std::size_t(i)];
  }
  // Kernel coefficients on reference slots (upper triangles), including the
  // explicit factor 2 of the discretized kernel term.
  Eigen::MatrixXd kr = Eigen::MatrixXd::Zero(m, m), kt = Eigen::MatrixXd::Zero(m, m);
  for (int k = 0; k < m; ++k)
    for (int l = k + 1; l < m; ++l)
      kr(k, l) = 2.0 *
                 bath.K(std::abs(reference.points[std::size_t(k)] - reference.points[std::size_t(l)])) *
                 reference.widths[std::size_t(k)] * reference.widths[std::size_t(l)];
  for (int i = 0; i < p_test.size(); ++i)
    for (int j = i + 1; j < p_test.size(); ++j) {
      const int a = std::min(slots[std::size_t(i)], slots[std::size_t(j)]);
      const int b = std::max(slots[std::size_t(i)], slots[std::size_t(j)]);
      kt(a, b) = 2.0 * bath.K(std::abs(p_test.points[std::size_t(i)] - p_test.points[std::size_t(j)])) *
                 p_test.widths[std::size_t(i)] * p_test.widths[std::size_t(j)];
    }

  double dj = 0.0, dg = 0.0, dk = 0.0;
  for (int k = 0; k < m; ++k) {
    dj += std::abs(jr[std::size_t(k)] - jt[std::size_t(k)]);
    dg += std::abs(gr[std::size_t(k)] - gt[std::size_t(k)]);
  }
  for (int k = 0; k < m; ++k)
    for (int l = k + 1; l < m; ++l) dk += std::abs(kr(k, l) - kt(k, l));

  // Cross-block sums for the commutator bound.
  double jk = 0.0, gk = 0.0, jg = 0.0, kkx = 0.0;
  for (int k = 0; k < m; ++k) {
    jg += std::abs(jr[std::size_t(k)]) * std::abs(gt[std::size_t(k)]) +
          std::abs(jt[std::size_t(k)]) * std::abs(gr[std::size_t(k)]);
    for (int l = 0; l < m; ++l) {
      if (l == k) continue;
      const double kr_kl = kr(std::min(k, l), std::max(k, l));
      const double kt_kl = kt(std::min(k, l), std::max(k, l));
      jk += std::abs(jr[std::size_t(k)]) * std::abs(kt_kl) +
            std::abs(jt[std::size_t(k)]) * std::abs(kr_kl);
      gk += std::abs(gr[std::size_t(k)]) * std::abs(kt_kl) +
            std::abs(gt[std::size_t(k)]) * std::abs(kr_kl);
    }
  }
  // Kernel-kernel pairs sharing exactly one mode.
  for (int k = 0; k < m; ++k)
    for (int l = k + 1; l < m; ++l) {
      if (kr(k, l) == 0.0 && kt(k, l) == 0.0) continue;
      for (int pq = 0; pq < m; ++pq) {
        if (pq == k || pq == l) continue;
        // pairs (k, pq) and (l, pq) each share one mode with (k, l)
        const double r1v = kr(std::min(k, pq), std::max(k, pq));
        const double t1v = kt(std::min(k, pq), std::max(k, pq));
        const double r2v = kr(std::min(l, pq), std::max(l, pq));
        const double t2v = kt(std::min(l, pq), std::max(l, pq));
        kkx += std::abs(kr(k, l)) * (std::abs(t1v) + std::abs(t2v)) +
               std::abs(kt(k, l)) * (std::abs(r1v) + std::abs(r2v));
      }
    }
  kkx *= 0.5;  // every sharing pair of pairs was visited twice

  ContinuumBoundReport rep;
  rep.n = p_test.size();
  rep.norm_pn = p_test.norm();
  rep.t = t;
  rep.a_norm = a_norm;
  rep.o_s_norm = o_norm;
  rep.sys_comm_norm = sys_comm;
  rep.r_j = mc.x * dj;
  rep.r_jk = mc.e_xw * jk + mc.e_xn * jg;
  rep.r_gk = mc.e_nw * gk;
  rep.r_k = mc.e_ww * kkx;
  rep.r_b = o_norm * rep.r_jk + rep.r_gk + rep.r_k;
  rep.comm_norm_bound = 2.0 * (sys_comm * rep.r_j + rep.r_b);
  rep.h_diff_norm_bound = o_norm * 2.0 * mc.c * dj + mc.w_factor * dk + mc.c * mc.c * dg;
  const double x = t * t * (sys_comm * rep.r_j + rep.r_b);
  rep.r1 = a_norm * x * (2.0 + x);
  rep.r2 = r2_bound(a_norm, rep.h_diff_norm_bound, t);
  rep.total = rep.r1 + rep.r2;
  return rep;
}

// ---------------------------------------------------------------------------
// Resolution search and flow

int required_resolution(const ContinuumBathSpec& bath, double t, double epsilon, int n_max,
                        double a_norm) {
  if (!(epsilon > 0.0)) throw ValidationError("required_resolution: epsilon must be positive");
  if (n_max < 1) throw ValidationError("required_resolution: n_max must be >= 1");
  int best_n = 0;
  double best = std::numeric_limits<double>::infinity();
  for (int n = 1; n <= n_max; n *= 2) {
    const ContinuumBoundReport rep = total_bound(bath, make_partition(bath.x_max, n), t, a_norm);
    if (rep.total < best) {
      best = rep.total;
      best_n = n;
    }
    if (rep.total <= epsilon) return n;
  }
  throw ResolutionError("required_resolution: bound " + std::to_string(best) + " > epsilon " +
                            std::to_string(epsilon) + " at n_max " + std::to_string(n_max),
                        best_n, best);
}

std::vector<ContinuumFlowPoint> continuum_flow(const ContinuumBathSpec& bath,
                                               const std::vector<double>& times, double epsilon,
                                               int n_max, double a_norm) {
  std::vector<ContinuumFlowPoint> out;
  out.reserve(times.size());
  for (double t : times) {
    ContinuumFlowPoint fp;
    fp.t = t;
    fp.n = required_resolution(bath, t, epsilon, n_max, a_norm);
    fp.j_weight = partition_weight(bath, make_partition(bath.x_max, fp.n));
    out.push_back(fp);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Empirical error against the reference surrogate

ContinuumReference make_continuum_reference(const ContinuumBathSpec& bath,
                                            const Partition& reference, int observable_site,
                                            const std::string& observable_op, std::int64_t cap) {
  ContinuumReference ref;
  ref.partition = reference;
  ref.surrogate = build_surrogate(bath, reference);
  ref.h = assemble_operator(ref.surrogate, cap);
  ref.eig = hermitian_eigen(ref.h.matrix);
  const DenseOperator a = make_site_operator(ref.surrogate, observable_site, observable_op);
  const DenseOperator a_emb = embed_operator(a, ref.surrogate.sites, cap);
  ref.a_eigenbasis = to_eigenbasis(ref.eig, a_emb.matrix);
  ref.a_norm = local_operator_norm(observable_op, ref.surrogate.dim_of(observable_site));
  ref.observable_site = observable_site;
  ref.observable_op = observable_op;
  return ref;
}

double reference_truncation_error(const ContinuumReference& ref, const ContinuumBathSpec& bath,
                                  const Partition& p_test, double t) {
  const HamiltonianSpec test_spec = build_surrogate_on_slots(bath, p_test, ref.partition);
  const DenseOperator h_small = assemble_operator(test_spec, 0);
  const DenseOperator a_small =
      embed_operator(make_site_operator(test_spec, ref.observable_site, ref.observable_op),
                     test_spec.sites, 0);
  const Eigen::MatrixXcd a_small_t = evolve_heisenberg(h_small.matrix, a_small.matrix, t);

  DenseOperator evolved;
  evolved.site_ids = h_small.site_ids;
  evolved.dims = h_small.dims;
  evolved.matrix = a_small_t;
  const DenseOperator emb = embed_operator(evolved, ref.surrogate.sites, 0);

  const Eigen::MatrixXcd test_in_eig = to_eigenbasis(ref.eig, emb.matrix);
  const Eigen::MatrixXcd ref_in_eig = evolve_in_eigenbasis(ref.eig, ref.a_eigenbasis, t);
  return spectral_norm(ref_in_eig - test_in_eig);
}

}  // namespace lightcone
