// Copyright 2026 The Lightcone Authors
// SPDX-License-Identifier: Apache-2.0
#include "lightcone/operator_catalog.hpp"

#include <cmath>
#include <complex>

#include "lightcone/errors.hpp"

namespace lightcone {

namespace {

using Cplx = std::complex<double>;

Eigen::MatrixXcd pauli(char which) {
  Eigen::MatrixXcd m(2, 2);
  switch (which) {
    case 'x':
      m << Cplx(0, 0), Cplx(1, 0), Cplx(1, 0), Cplx(0, 0);
      break;
    case 'y':
      m << Cplx(0, 0), Cplx(0, -1), Cplx(0, 1), Cplx(0, 0);
      break;
    case 'z':
      m << Cplx(1, 0), Cplx(0, 0), Cplx(0, 0), Cplx(-1, 0);
      break;
    case '+':  // |0><1|
      m << Cplx(0, 0), Cplx(1, 0), Cplx(0, 0), Cplx(0, 0);
      break;
    default:  // '-' = |1><0|
      m << Cplx(0, 0), Cplx(0, 0), Cplx(1, 0), Cplx(0, 0);
      break;
  }
  return m;
}

Eigen::MatrixXcd lowering(int dim) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (int k = 1; k < dim; ++k) m(k - 1, k) = Cplx(std::sqrt(double(k)), 0);
  return m;
}

double exact_norm(const Eigen::MatrixXcd& m) {
  if (m.rows() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues()(0);
}

}  // namespace

OperatorCatalogEntry catalog_entry(const std::string& name, int dim) {
  if (dim < 1) throw ValidationError("catalog: dimension must be >= 1, got " + std::to_string(dim));
  OperatorCatalogEntry e;
  e.name = name;
  e.dim = dim;
  const bool qubit_op =
      name == "sx" || name == "sy" || name == "sz" || name == "sp" || name == "sm";
  if (qubit_op) {
    if (dim != 2)
      throw ValidationError("catalog: operator '" + name + "' requires dim 2, got " +
                            std::to_string(dim));
    if (name == "sx") e.matrix = pauli('x');
    else if (name == "sy") e.matrix = pauli('y');
    else if (name == "sz") e.matrix = pauli('z');
    else if (name == "sp") e.matrix = pauli('+');
    else e.matrix = pauli('-');
  } else if (name == "id") {
    e.matrix = Eigen::MatrixXcd::Identity(dim, dim);
  } else if (name == "a" || name == "adag" || name == "n") {
    if (dim < 2)
      throw ValidationError("catalog: operator '" + name + "' requires dim >= 2, got " +
                            std::to_string(dim));
    Eigen::MatrixXcd a = lowering(dim);
    if (name == "a") e.matrix = a;
    else if (name == "adag") e.matrix = a.adjoint();
    else e.matrix = a.adjoint() * a;
  } else {
    throw ValidationError("catalog: unknown operator name '" + name + "'");
  }
  e.norm = exact_norm(e.matrix);
  return e;
}

Eigen::MatrixXcd local_operator(const std::string& name, int dim) {
  return catalog_entry(name, dim).matrix;
}

double local_operator_norm(const std::string& name, int dim) {
  return catalog_entry(name, dim).norm;
}

bool catalog_has(const std::string& name, int dim) {
  try {
    catalog_entry(name, dim);
    return true;
  } catch (const ValidationError&) {
    return false;
  }
}

const std::vector<std::string>& catalog_names() {
  static const std::vector<std::string> names = {"sx", "sy", "sz", "sp", "sm",
                                                 "id", "a",  "adag", "n"};
  return names;
}

}  // namespace lightcone
