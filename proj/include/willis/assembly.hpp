#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "willis/linalg.hpp"
#include "willis/material.hpp"
#include "willis/tensors.hpp"

namespace willis {

// State layout (0-based): v[3j + a] = d_j u~_a for j, a in 0..2 (gradient
// block j), v[9 + a] = d_t u~_a, v[12 + a] = u~_a.

// block[j][k] is C_j^k with entries (a, b) = C_{a j b k}.  Block row k,
// block column j of the assembled 9x9 matrix holds C_j^k.
struct BlockSet {
  std::array<std::array<Mat3, 3>, 3> block;
  Mat9 assembled() const;
};

BlockSet elastic_blocks(const ElasticTensor& C);

class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

Mat15 assemble_A0(const ElasticTensor& C, double rho);
// axis in {0, 1, 2}
Mat15 assemble_Ak(const ElasticTensor& C, int axis);

// F[j](i, k) = S_{jki} - S_{ijk}
std::array<Mat3, 3> assemble_F(const CouplingTensor& S);

// D^i_{kl} = d_t S_{kli} - sum_j d_j C_{ijkl}; returned as 3x9 with row i and
// column 3k + l.
Eigen::Matrix<double, 3, 9> assemble_D(const MaterialSample& m);
// V(i, k) = -sum_j d_j S_{ijk} + d_t rho delta_ik, the velocity block of B.
Mat3 assemble_velocity_block(const MaterialSample& m);
Mat15 assemble_B(const MaterialSample& m);

struct UnsymmetrizedSystem {
  Mat15 A0;
  std::array<Mat15, 3> A;
};
UnsymmetrizedSystem assemble_unsymmetrized(const ElasticTensor& C, double rho, const CouplingTensor& S);

struct SymmetrizedSystem {
  Mat15 A0;
  std::array<Mat15, 3> A;
  // Left multiplier realizing the row combinations: A0 = T * A0~, Ak = T * Ak~.
  Mat15 transform;
};

struct FEntry {
  int matrix;  // 0..2
  int row, col;
  double value;
};

class SymmetrizationObstruction : public std::runtime_error {
 public:
  SymmetrizationObstruction(const std::string& msg, std::vector<FEntry> entries)
      : std::runtime_error(msg), entries_(std::move(entries)) {}
  const std::vector<FEntry>& entries() const { return entries_; }

 private:
  std::vector<FEntry> entries_;
};

Mat15 symmetrization_transform(const ElasticTensor& C);
// Throws SymmetrizationObstruction when any F block of the unsymmetrized
// system is nonzero.
SymmetrizedSystem symmetrize(const UnsymmetrizedSystem& sys, const ElasticTensor& C);

// H_ijkl = C_ijkl - (1/rho) sum_m S_ijm S_klm
HTensor assemble_H(const ElasticTensor& C, const CouplingTensor& S, double rho);

// e from the boundary lift (returned as e, not rho e).
Vec3 boundary_source_e(const LiftSample& lift, const MaterialSample& m);
// Components 10..12 (1-based) carry -rho e so that L v = w reproduces the
// second-order displacement equation.
Vec15 assemble_w(const MaterialSample& m, const Vec3& e);

struct PointSystem {
  Mat15 A0;
  std::array<Mat15, 3> A;
  Mat15 B;
  Vec15 w;
};
PointSystem assemble_point(const MaterialSample& m, const LiftSample& lift);

// Spectral report of A0 (smallest eigenvalue by symmetric eigensolve).
struct A0Report {
  double min_eigenvalue = 0.0;
  double max_abs_eigenvalue = 0.0;
  bool positive_definite = false;
};
// Positive definite means min eigenvalue > rel_tol * max |eigenvalue|.
A0Report inspect_A0(const Mat15& A0, double rel_tol = 1e-12);

// A0 over an isotropic (lambda, mu) grid; inadmissible pairs (mu <= 0 or
// 3 lambda + 2 mu <= 0) are skipped.  sign: +1 positive definite, 0 when
// |min eig| <= rel_tol max |eig|, -1 indefinite.
struct A0SweepPoint {
  double lambda = 0.0, mu = 0.0;
  double min_eigenvalue = 0.0, max_abs_eigenvalue = 0.0;
  int sign = 0;
};
std::vector<A0SweepPoint> a0_definiteness_sweep(const std::vector<double>& lambdas, const std::vector<double>& mus,
                                                double rho = 1.0, double rel_tol = 1e-12);

// ---- boundary analysis

struct BoundaryPoint {
  Vec3 normal;
  Mat9 C_nu;
  Mat15 A_nu;
  Mat15 M;
  KernelBasis ker_C_nu, ker_A_nu, ker_M;
};

Mat9 assemble_C_nu(const ElasticTensor& C, const Vec3& nu);
Mat15 assemble_M(const Mat9& C_nu);
// Block form: upper-right -C_r^nu, lower-left -C_c^nu, lower-right (nu1+nu2+nu3) I.
Mat15 assemble_A_nu_blocks(const ElasticTensor& C, const Vec3& nu);
BoundaryPoint assemble_boundary(const ElasticTensor& C, const std::array<Mat15, 3>& A, const Vec3& nu);

struct NonnegativityReport {
  // max |z4|, |z5|, |C_nu z123| over the ker(A_nu) basis
  double ker_A_nu_residual = 0.0;
  // max |z5|, |C_nu z123| over the ker(M) basis
  double ker_M_residual = 0.0;
  // |A_nu z| for z built from ker(C_nu) (converse inclusion)
  double ker_A_nu_converse_residual = 0.0;
  // extreme eigenvalues of Z^T A_nu Z on ker(M)
  double min_quadratic = 0.0;
  double max_abs_quadratic = 0.0;
  int dim_ker_C_nu = 0;
  int dim_ker_A_nu = 0;
  int dim_ker_M = 0;
  // number of nonnegative eigenvalues of A_nu; equal to dim ker(M) iff ker(M)
  // is maximal nonnegative
  int nonnegative_eigenvalues = 0;
  bool nonnegative = false;
  bool maximal = false;
};

NonnegativityReport check_maximal_nonnegative(const BoundaryPoint& bp, double tol = 1e-10);

}  // namespace willis
