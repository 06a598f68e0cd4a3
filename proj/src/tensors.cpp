#include "willis/tensors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace willis {

int voigt_index(int i, int j) {
  if (i == j) return i;
  int s = i + j;  // 1 -> (0,1), 2 -> (0,2), 3 -> (1,2)
  return s == 3 ? 3 : (s == 2 ? 4 : 5);
}

ElasticTensor ElasticTensor::from_voigt(const Mat6& v) {
  ElasticTensor C;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          int I = voigt_index(i, j), J = voigt_index(k, l);
          // read the upper triangle only so an unsymmetric input cannot
          // break major symmetry
          C(i, j, k, l) = I <= J ? v(I, J) : v(J, I);
        }
  return C;
}

Mat6 ElasticTensor::voigt() const {
  static const int pairs[6][2] = {{0, 0}, {1, 1}, {2, 2}, {1, 2}, {0, 2}, {0, 1}};
  Mat6 v;
  for (int I = 0; I < 6; ++I)
    for (int J = 0; J < 6; ++J) v(I, J) = (*this)(pairs[I][0], pairs[I][1], pairs[J][0], pairs[J][1]);
  return v;
}

Mat6 ElasticTensor::symmetric_space_matrix() const {
  static const int pairs[6][2] = {{0, 0}, {1, 1}, {2, 2}, {1, 2}, {0, 2}, {0, 1}};
  const double r2 = std::sqrt(2.0);
  Mat6 m;
  for (int I = 0; I < 6; ++I)
    for (int J = 0; J < 6; ++J) {
      // <C:E_I, E_J> with E the orthonormal basis of Sym(3); averaging the
      // index orders keeps the result symmetric for tensors with defects
      int i = pairs[I][0], j = pairs[I][1], k = pairs[J][0], l = pairs[J][1];
      double v = 0.25 * ((*this)(i, j, k, l) + (*this)(j, i, k, l) + (*this)(i, j, l, k) + (*this)(j, i, l, k));
      double w = (I < 3 ? 1.0 : r2) * (J < 3 ? 1.0 : r2);
      m(I, J) = v * w;
    }
  return 0.5 * (m + m.transpose());
}

ElasticTensor make_isotropic(double lambda, double mu) {
  if (!(mu > 0.0) || !(3.0 * lambda + 2.0 * mu > 0.0))
    throw std::invalid_argument("isotropic stiffness needs mu > 0 and 3 lambda + 2 mu > 0");
  Mat6 v = Mat6::Zero();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) v(i, j) = lambda + (i == j ? 2.0 * mu : 0.0);
  for (int i = 3; i < 6; ++i) v(i, i) = mu;
  return ElasticTensor::from_voigt(v);
}

ElasticReport validate_elastic(const ElasticTensor& C, double rel_tol) {
  ElasticReport r;
  for (double x : C.c) r.scale = std::max(r.scale, std::abs(x));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          double c = C(i, j, k, l);
          r.minor_violation = std::max({r.minor_violation, std::abs(c - C(j, i, k, l)), std::abs(c - C(i, j, l, k))});
          r.major_violation = std::max(r.major_violation, std::abs(c - C(k, l, i, j)));
        }
  Eigen::SelfAdjointEigenSolver<Mat6> es(C.symmetric_space_matrix(), Eigen::EigenvaluesOnly);
  r.min_eigenvalue = es.eigenvalues()(0);
  double tol = rel_tol * r.scale;
  r.symmetric = r.minor_violation <= tol && r.major_violation <= tol;
  r.positive_definite = r.min_eigenvalue > rel_tol * r.scale && r.min_eigenvalue > 0.0;
  return r;
}

std::string to_string(CouplingSymmetry s) {
  switch (s) {
    case CouplingSymmetry::none: return "none";
    case CouplingSymmetry::first_pair: return "first-pair";
    case CouplingSymmetry::totally_symmetric: return "totally-symmetric";
  }
  return "?";
}

int sym3_index(int i, int j, int k) {
  int a[3] = {i, j, k};
  std::sort(a, a + 3);
  static const int table[3][3][3] = {
      {{0, 1, 2}, {-1, 3, 4}, {-1, -1, 5}},
      {{-1, -1, -1}, {-1, 6, 7}, {-1, -1, 8}},
      {{-1, -1, -1}, {-1, -1, -1}, {-1, -1, 9}}};
  return table[a[0]][a[1]][a[2]];
}

CouplingTensor CouplingTensor::totally_symmetric(const std::array<double, 10>& p) {
  CouplingTensor S;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) S(i, j, k) = p[sym3_index(i, j, k)];
  return S;
}

CouplingTensor CouplingTensor::symmetrized() const {
  CouplingTensor S;
  const auto& T = *this;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        S(i, j, k) = (T(i, j, k) + T(i, k, j) + T(j, i, k) + T(j, k, i) + T(k, i, j) + T(k, j, i)) / 6.0;
  // make equal permutations bitwise identical
  std::array<double, 10> p{};
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j)
      for (int k = j; k < 3; ++k) p[sym3_index(i, j, k)] = S(i, j, k);
  return totally_symmetric(p);
}

double CouplingTensor::max_abs() const {
  double m = 0.0;
  for (double x : s) m = std::max(m, std::abs(x));
  return m;
}

CouplingReport validate_coupling(const CouplingTensor& S, double rel_tol) {
  CouplingReport r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        r.cc1_violation = std::max(r.cc1_violation, std::abs(S(i, j, k) - S(j, i, k)));
        r.cc2_violation = std::max(r.cc2_violation, std::abs(S(i, j, k) - S(j, k, i)));
      }
  double tol = rel_tol * S.max_abs();
  if (r.cc1_violation <= tol) {
    r.status = r.cc2_violation <= tol ? CouplingSymmetry::totally_symmetric : CouplingSymmetry::first_pair;
  }
  return r;
}

Mat3 strain(const Mat3& G) { return 0.5 * (G + G.transpose()); }

Mat3 contract(const ElasticTensor& C, const Mat3& G) {
  Mat3 s = Mat3::Zero();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double acc = 0.0;
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) acc += C(i, j, k, l) * G(k, l);
      s(i, j) = acc;
    }
  return s;
}

Mat3 contract(const CouplingTensor& S, const Vec3& v) {
  Mat3 s;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) s(i, j) = S(i, j, 0) * v(0) + S(i, j, 1) * v(1) + S(i, j, 2) * v(2);
  return s;
}

Vec3 contract_first_pair(const CouplingTensor& S, const Mat3& G) {
  Vec3 r = Vec3::Zero();
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k)
      for (int l = 0; l < 3; ++l) r(i) += S(k, l, i) * G(k, l);
  return r;
}

}  // namespace willis
