// Copyright 2026 The Lightcone Authors
// SPDX-License-Identifier: Apache-2.0
#include "lightcone/dense_operator.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "lightcone/errors.hpp"
#include "lightcone/operator_catalog.hpp"

#ifdef LIGHTCONE_HAVE_LAPACKE
#define LAPACK_COMPLEX_CUSTOM
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>
#endif

namespace lightcone {

namespace {

using Cplx = std::complex<double>;

constexpr int kDenseSvdThreshold = 512;
constexpr int kLapackeThreshold = 256;

bool is_hermitian(const Eigen::MatrixXcd& m, double rel_tol = 1e-10) {
  const double scale = std::max(1.0, m.norm());
  return (m - m.adjoint()).norm() <= rel_tol * scale;
}

// Strides of each tensor factor (first factor slowest).
std::vector<std::int64_t> factor_strides(const std::vector<int>& dims) {
  std::vector<std::int64_t> stride(dims.size(), 1);
  for (int k = int(dims.size()) - 2; k >= 0; --k)
    stride[std::size_t(k)] = stride[std::size_t(k) + 1] * dims[std::size_t(k) + 1];
  return stride;
}

// Kronecker product of a list of small matrices, first factor slowest.
Eigen::MatrixXcd kron_list(const std::vector<Eigen::MatrixXcd>& mats) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Ones(1, 1);
  for (const auto& m : mats) {
    Eigen::MatrixXcd next(out.rows() * m.rows(), out.cols() * m.cols());
    for (Eigen::Index i = 0; i < out.rows(); ++i)
      for (Eigen::Index j = 0; j < out.cols(); ++j)
        next.block(i * m.rows(), j * m.cols(), m.rows(), m.cols()) = out(i, j) * m;
    out.swap(next);
  }
  return out;
}

// Adds local (x) identity-on-the-rest into `target`, where `local` acts on
// the tensor factors listed in `positions` (strictly increasing) and was
// built with those factors ordered the same way.
void embed_add(Eigen::MatrixXcd& target, const std::vector<int>& dims,
               const std::vector<int>& positions, const Eigen::MatrixXcd& local) {
  const auto stride = factor_strides(dims);
  std::vector<int> rest;
  for (int k = 0; k < int(dims.size()); ++k)
    if (std::find(positions.begin(), positions.end(), k) == positions.end()) rest.push_back(k);

  std::int64_t rest_count = 1;
  for (int k : rest) rest_count *= dims[std::size_t(k)];
  const Eigen::Index ldim = local.rows();

  // Offsets of every local row/col index combination.
  std::vector<std::int64_t> local_offset(static_cast<std::size_t>(ldim));
  for (Eigen::Index a = 0; a < ldim; ++a) {
    std::int64_t rem = a, off = 0;
    for (int k = int(positions.size()) - 1; k >= 0; --k) {
      const int d = dims[std::size_t(positions[std::size_t(k)])];
      off += (rem % d) * stride[std::size_t(positions[std::size_t(k)])];
      rem /= d;
    }
    local_offset[std::size_t(a)] = off;
  }

  for (std::int64_t r = 0; r < rest_count; ++r) {
    std::int64_t rem = r, base = 0;
    for (int k = int(rest.size()) - 1; k >= 0; --k) {
      const int d = dims[std::size_t(rest[std::size_t(k)])];
      base += (rem % d) * stride[std::size_t(rest[std::size_t(k)])];
      rem /= d;
    }
    for (Eigen::Index a = 0; a < ldim; ++a)
      for (Eigen::Index b = 0; b < ldim; ++b)
        target(base + local_offset[std::size_t(a)], base + local_offset[std::size_t(b)]) +=
            local(a, b);
  }
}

// Local matrix of one term over its sites sorted into spec order; returns the
// sorted factor positions too.
std::pair<std::vector<int>, Eigen::MatrixXcd> term_local_matrix(const HamiltonianSpec& spec,
                                                                const InteractionTerm& term) {
  std::vector<std::pair<int, std::string>> factors;  // (position in spec order, op)
  for (std::size_t k = 0; k < term.sites.size(); ++k)
    factors.emplace_back(spec.site_index(term.sites[k]), term.ops[k]);
  std::sort(factors.begin(), factors.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<int> positions;
  std::vector<Eigen::MatrixXcd> mats;
  for (const auto& [pos, op] : factors) {
    positions.push_back(pos);
    mats.push_back(local_operator(op, spec.sites[std::size_t(pos)].dim));
  }
  Eigen::MatrixXcd local = kron_list(mats) * term.coeff;
  return {positions, std::move(local)};
}

}  // namespace

DenseOperator assemble_operator(const HamiltonianSpec& spec, std::int64_t cap) {
  validate_spec(spec);
  const std::int64_t dim = spec.total_dim(cap);
  DenseOperator out;
  for (const auto& s : spec.sites) {
    out.site_ids.push_back(s.id);
    out.dims.push_back(s.dim);
  }
  out.matrix = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& term : spec.terms) {
    auto [positions, local] = term_local_matrix(spec, term);
    embed_add(out.matrix, out.dims, positions, local);
  }
  return out;
}

DenseOperator make_site_operator(const HamiltonianSpec& spec, int site_id,
                                 const std::string& op_name) {
  const int idx = spec.site_index(site_id);
  if (idx < 0)
    throw ValidationError("make_site_operator: unknown site id " + std::to_string(site_id));
  DenseOperator out;
  out.site_ids = {site_id};
  out.dims = {spec.sites[std::size_t(idx)].dim};
  out.matrix = local_operator(op_name, out.dims[0]);
  out.label = op_name + "@" + std::to_string(site_id);
  return out;
}

DenseOperator embed_operator(const DenseOperator& a, const std::vector<SiteSpec>& full_sites,
                             std::int64_t cap) {
  DenseOperator out;
  std::int64_t dim = 1;
  for (const auto& s : full_sites) {
    out.site_ids.push_back(s.id);
    out.dims.push_back(s.dim);
    dim *= s.dim;
    if (cap > 0 && dim > cap)
      throw ResourceError("embed_operator: dimension exceeds cap " + std::to_string(cap));
  }
  std::vector<int> positions;
  for (std::size_t k = 0; k < a.site_ids.size(); ++k) {
    int pos = -1;
    for (std::size_t f = 0; f < full_sites.size(); ++f)
      if (full_sites[f].id == a.site_ids[k]) pos = int(f);
    if (pos < 0)
      throw ValidationError("embed_operator: site " + std::to_string(a.site_ids[k]) +
                            " absent from the target space");
    if (full_sites[std::size_t(pos)].dim != a.dims[k])
      throw ValidationError("embed_operator: dimension mismatch at site " +
                            std::to_string(a.site_ids[k]));
    if (!positions.empty() && pos <= positions.back())
      throw ValidationError("embed_operator: site order of the operator must match the target");
    positions.push_back(pos);
  }
  out.matrix = Eigen::MatrixXcd::Zero(dim, dim);
  embed_add(out.matrix, out.dims, positions, a.matrix);
  out.label = a.label;
  return out;
}

double spectral_norm(const Eigen::MatrixXcd& m) {
  if (m.rows() != m.cols()) throw ValidationError("spectral_norm: matrix must be square");
  if (m.rows() == 0) return 0.0;
  if (m.rows() < kDenseSvdThreshold) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    return svd.singularValues()(0);
  }
  // Hermitian matrices (the common case here: differences of Heisenberg
  // evolutions) get an exact eigenvalue computation; power iteration can stall
  // on them when the top singular values are nearly degenerate.
  if (is_hermitian(m)) {
#ifdef LIGHTCONE_HAVE_LAPACKE
    if (m.rows() >= kLapackeThreshold) {
      const lapack_int n = lapack_int(m.rows());
      Eigen::MatrixXcd work = m;
      Eigen::VectorXd w(n);
      lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'N', 'L', n, work.data(), n, w.data());
      if (info != 0)
        throw NumericError("spectral_norm: zheevd failed with info " + std::to_string(info));
      return w.cwiseAbs().maxCoeff();
    }
#endif
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
      throw NumericError("spectral_norm: eigensolver failed to converge");
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  // Power iteration on m^dag m with a deterministic start vector.
  std::mt19937_64 rng(0x5DEECE66DULL);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXcd v(m.rows());
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = Cplx(u(rng), u(rng));
  v.normalize();
  double sigma = 0.0;
  constexpr int kMaxIter = 20000;
  constexpr double kTol = 1e-10;  // relative accuracy of the dominant singular value
  int stable = 0;
  for (int it = 0; it < kMaxIter; ++it) {
    Eigen::VectorXcd w = m * v;
    Eigen::VectorXcd z = m.adjoint() * w;
    const double zn = z.norm();
    if (zn == 0.0) return 0.0;  // v in the kernel of m^dag m => try the norm of w
    const double next = std::sqrt(zn);
    v = z / zn;
    if (std::abs(next - sigma) <= kTol * std::max(next, 1e-300)) {
      if (++stable >= 2) return next;
    } else {
      stable = 0;
    }
    sigma = next;
  }
  throw NumericError("spectral_norm: power iteration did not converge");
}

HermitianEigen hermitian_eigen(const Eigen::MatrixXcd& h) {
  if (h.rows() != h.cols()) throw ValidationError("hermitian_eigen: matrix must be square");
  if (!is_hermitian(h)) throw ValidationError("hermitian_eigen: matrix is not Hermitian");
  HermitianEigen out;
#ifdef LIGHTCONE_HAVE_LAPACKE
  if (h.rows() >= kLapackeThreshold) {
    const lapack_int n = lapack_int(h.rows());
    Eigen::MatrixXcd work = h;  // column-major, overwritten with eigenvectors
    Eigen::VectorXd w(n);
    lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', n, work.data(), n, w.data());
    if (info != 0)
      throw NumericError("hermitian_eigen: zheevd failed with info " + std::to_string(info));
    out.evals = std::move(w);
    out.evecs = std::move(work);
    return out;
  }
#endif
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  if (es.info() != Eigen::Success)
    throw NumericError("hermitian_eigen: eigensolver failed to converge");
  out.evals = es.eigenvalues();
  out.evecs = es.eigenvectors();
  return out;
}

Eigen::MatrixXcd to_eigenbasis(const HermitianEigen& eig, const Eigen::MatrixXcd& a) {
  return eig.evecs.adjoint() * a * eig.evecs;
}

Eigen::MatrixXcd evolve_in_eigenbasis(const HermitianEigen& eig, const Eigen::MatrixXcd& a_eig,
                                      double t) {
  // A(t) = e^{iHt} A e^{-iHt}: entry (i,j) picks up e^{i(E_i - E_j)t}.
  Eigen::MatrixXcd out = a_eig;
  const Eigen::Index n = out.rows();
  Eigen::VectorXcd phase(n);
  for (Eigen::Index i = 0; i < n; ++i)
    phase(i) = std::exp(Cplx(0.0, eig.evals(i) * t));
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      out(i, j) *= phase(i) * std::conj(phase(j));
  return out;
}

Eigen::MatrixXcd from_eigenbasis(const HermitianEigen& eig, const Eigen::MatrixXcd& a_eig) {
  return eig.evecs * a_eig * eig.evecs.adjoint();
}

Eigen::MatrixXcd evolve_heisenberg(const Eigen::MatrixXcd& h, const Eigen::MatrixXcd& a,
                                   double t) {
  if (h.rows() != a.rows() || h.cols() != a.cols())
    throw ValidationError("evolve_heisenberg: operator dimensions disagree");
  if (t == 0.0) return a;
  const HermitianEigen eig = hermitian_eigen(h);
  return from_eigenbasis(eig, evolve_in_eigenbasis(eig, to_eigenbasis(eig, a), t));
}

double truncation_error(const DenseOperator& h_full, const DenseOperator& h_trunc,
                        const DenseOperator& a, double t) {
  std::vector<SiteSpec> frame;
  for (std::size_t k = 0; k < h_full.site_ids.size(); ++k)
    frame.push_back({h_full.site_ids[k], h_full.dims[k], SiteKind::Environment});
  const DenseOperator ht = embed_operator(h_trunc, frame, 0);
  const DenseOperator ae = embed_operator(a, frame, 0);
  const Eigen::MatrixXcd full_t = evolve_heisenberg(h_full.matrix, ae.matrix, t);
  const Eigen::MatrixXcd trunc_t = evolve_heisenberg(ht.matrix, ae.matrix, t);
  return spectral_norm(full_t - trunc_t);
}

std::int64_t trotter_steps(double op_norm, double t, std::int64_t n_terms, double eps2) {
  if (!(eps2 > 0.0)) throw ValidationError("trotter_steps: accuracy budget must be positive");
  if (n_terms < 0) throw ValidationError("trotter_steps: negative term count");
  const double raw =
      std::ceil(op_norm * op_norm * t * t * double(n_terms) * double(n_terms) / eps2);
  if (raw > 9e15) throw ResourceError("trotter_steps: step count overflows");
  return std::max<std::int64_t>(1, std::int64_t(raw));
}

Eigen::MatrixXcd trotter_propagate(const HamiltonianSpec& spec, double t, std::int64_t steps,
                                   std::int64_t cap) {
  validate_spec(spec);
  if (steps < 1) throw ValidationError("trotter_propagate: steps must be >= 1");
  const std::int64_t dim = spec.total_dim(cap);
  const double dt = t / double(steps);
  std::vector<int> dims;
  for (const auto& s : spec.sites) dims.push_back(s.dim);

  Eigen::MatrixXcd step = Eigen::MatrixXcd::Identity(dim, dim);
  for (const auto& term : spec.terms) {
    auto [positions, local] = term_local_matrix(spec, term);
    Eigen::MatrixXcd e_local;
    if (is_hermitian(local)) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(local);
      Eigen::VectorXcd ph(es.eigenvalues().size());
      for (Eigen::Index i = 0; i < ph.size(); ++i)
        ph(i) = std::exp(Cplx(0.0, -es.eigenvalues()(i) * dt));
      e_local = es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
    } else {
      e_local = (Cplx(0.0, -dt) * local).exp();
    }
    Eigen::MatrixXcd factor = Eigen::MatrixXcd::Zero(dim, dim);
    embed_add(factor, dims, positions, e_local);  // exp(-i h dt) (x) identity
    step = (step * factor).eval();
  }
  // Binary powering keeps the multiplication count at O(log steps).
  Eigen::MatrixXcd result = Eigen::MatrixXcd::Identity(dim, dim);
  Eigen::MatrixXcd base = step;
  std::int64_t e = steps;
  while (e > 0) {
    if (e & 1) result = (result * base).eval();
    base = (base * base).eval();
    e >>= 1;
  }
  return result;
}

std::int64_t sk_gate_count(std::int64_t n_d, double eps2, double a, double b) {
  if (n_d < 1) throw ValidationError("sk_gate_count: n_d must be >= 1");
  if (!(eps2 > 0.0)) throw ValidationError("sk_gate_count: eps2 must be positive");
  if (!(a > 0.0) || b < 0.0) throw ValidationError("sk_gate_count: invalid constants");
  const double lg = std::max(0.0, std::log2(double(n_d) / eps2));
  const double raw = std::ceil(a * double(n_d) * std::pow(lg, b));
  if (raw > 9e15) throw ResourceError("sk_gate_count: count overflows");
  return std::int64_t(raw);
}

namespace {
constexpr char kMagic[4] = {'L', 'C', 'O', 'P'};
constexpr std::uint32_t kDumpVersion = 1;

template <typename T>
void write_pod(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T>
void read_pod(std::ifstream& in, T& v) {
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw ValidationError("operator dump: truncated file");
}
}  // namespace

void save_operator(const DenseOperator& op, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open '" + path + "' for writing");
  out.write(kMagic, 4);
  write_pod(out, kDumpVersion);
  write_pod(out, std::uint32_t(op.site_ids.size()));
  for (std::size_t k = 0; k < op.site_ids.size(); ++k) {
    write_pod(out, std::int32_t(op.site_ids[k]));
    write_pod(out, std::int32_t(op.dims[k]));
  }
  write_pod(out, std::uint32_t(op.label.size()));
  out.write(op.label.data(), std::streamsize(op.label.size()));
  const Eigen::Index n = op.matrix.rows();
  write_pod(out, std::uint64_t(n));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const Cplx z = op.matrix(i, j);
      const double re = z.real(), im = z.imag();
      write_pod(out, re);
      write_pod(out, im);
    }
  if (!out) throw ValidationError("failed while writing '" + path + "'");
}

DenseOperator load_operator(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw ValidationError("operator dump: bad magic in '" + path + "'");
  std::uint32_t version = 0;
  read_pod(in, version);
  if (version != kDumpVersion)
    throw ValidationError("operator dump: unsupported version " + std::to_string(version));
  std::uint32_t nsites = 0;
  read_pod(in, nsites);
  DenseOperator op;
  std::int64_t dim = 1;
  for (std::uint32_t k = 0; k < nsites; ++k) {
    std::int32_t id = 0, d = 0;
    read_pod(in, id);
    read_pod(in, d);
    if (d < 1) throw ValidationError("operator dump: invalid site dimension");
    op.site_ids.push_back(id);
    op.dims.push_back(d);
    dim *= d;
  }
  std::uint32_t label_len = 0;
  read_pod(in, label_len);
  op.label.resize(label_len);
  if (label_len) in.read(op.label.data(), label_len);
  std::uint64_t n = 0;
  read_pod(in, n);
  if (nsites > 0 && std::int64_t(n) != dim)
    throw ValidationError("operator dump: matrix size disagrees with site dims");
  op.matrix.resize(Eigen::Index(n), Eigen::Index(n));
  for (Eigen::Index i = 0; i < Eigen::Index(n); ++i)
    for (Eigen::Index j = 0; j < Eigen::Index(n); ++j) {
      double re = 0, im = 0;
      read_pod(in, re);
      read_pod(in, im);
      op.matrix(i, j) = Cplx(re, im);
    }
  return op;
}

}  // namespace lightcone
