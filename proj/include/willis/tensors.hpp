#pragma once

#include <array>
#include <string>

#include "willis/linalg.hpp"

namespace willis {

// All tensor indices are 0-based in code: (i,j,k,l) in {0,1,2}^4.

struct ElasticTensor {
  std::array<double, 81> c{};

  double& operator()(int i, int j, int k, int l) { return c[27 * i + 9 * j + 3 * k + l]; }
  double operator()(int i, int j, int k, int l) const { return c[27 * i + 9 * j + 3 * k + l]; }

  static ElasticTensor zero() { return {}; }
  // Fills all 81 entries from a symmetric 6x6 Voigt matrix (11,22,33,23,13,12
  // ordering) by copying, so minor and major symmetry hold bitwise.
  static ElasticTensor from_voigt(const Mat6& v);
  Mat6 voigt() const;
  // 6x6 matrix of the quadratic form on Sym(3) in the orthonormal basis
  // {e_i e_i, (e_i e_j + e_j e_i)/sqrt(2)}.
  Mat6 symmetric_space_matrix() const;
};

using HTensor = ElasticTensor;

int voigt_index(int i, int j);

ElasticTensor make_isotropic(double lambda, double mu);

struct ElasticReport {
  double minor_violation = 0.0;  // max |C_ijkl - C_jikl|, |C_ijkl - C_ijlk|
  double major_violation = 0.0;  // max |C_ijkl - C_klij|
  double min_eigenvalue = 0.0;   // c1 estimate on Sym(3)
  double scale = 0.0;            // max |C_ijkl|
  bool symmetric = false;
  bool positive_definite = false;
  bool ok() const { return symmetric && positive_definite; }
};

// rel_tol = 0 means exact comparison (constructed tensors); sampled tensors
// use 1e-12.
ElasticReport validate_elastic(const ElasticTensor& C, double rel_tol = 0.0);

enum class CouplingSymmetry { none = 0, first_pair = 1, totally_symmetric = 2 };
std::string to_string(CouplingSymmetry s);

struct CouplingTensor {
  std::array<double, 27> s{};

  double& operator()(int i, int j, int k) { return s[9 * i + 3 * j + k]; }
  double operator()(int i, int j, int k) const { return s[9 * i + 3 * j + k]; }

  static CouplingTensor zero() { return {}; }
  // Totally symmetric tensor from its 10 independent values, ordered by sorted
  // index triple: 000 001 002 011 012 022 111 112 122 222.
  static CouplingTensor totally_symmetric(const std::array<double, 10>& p);
  // Average over all six index permutations.
  CouplingTensor symmetrized() const;
  double max_abs() const;
};

// Position of the sorted triple (i,j,k) in the 10-parameter ordering.
int sym3_index(int i, int j, int k);

struct CouplingReport {
  double cc1_violation = 0.0;  // max |S_ijk - S_jik|
  double cc2_violation = 0.0;  // max |S_ijk - S_jki|
  CouplingSymmetry status = CouplingSymmetry::none;
};

CouplingReport validate_coupling(const CouplingTensor& S, double rel_tol = 0.0);

// eps = (G + G^T)/2
Mat3 strain(const Mat3& G);

// (C.G)_ij = C_ijkl G_kl
Mat3 contract(const ElasticTensor& C, const Mat3& G);
// (S v)_ij = S_ijk v_k
Mat3 contract(const CouplingTensor& S, const Vec3& v);
// (S^T : G)_i = S_kli G_kl
Vec3 contract_first_pair(const CouplingTensor& S, const Mat3& G);

}  // namespace willis
