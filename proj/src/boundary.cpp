#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "willis/assembly.hpp"

namespace willis {

Mat9 assemble_C_nu(const ElasticTensor& C, const Vec3& nu) {
  BlockSet b = elastic_blocks(C);
  Mat9 m;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m.block<3, 3>(3 * r, 3 * c) = nu(r) * b.block[c][r];
  return m;
}

Mat15 assemble_M(const Mat9& C_nu) {
  Mat15 M = Mat15::Zero();
  M.topLeftCorner<9, 9>() = C_nu;
  M.bottomRightCorner<3, 3>().setIdentity();
  return M;
}

Mat15 assemble_A_nu_blocks(const ElasticTensor& C, const Vec3& nu) {
  BlockSet b = elastic_blocks(C);
  Mat15 A = Mat15::Zero();
  for (int c = 0; c < 3; ++c) {
    Mat3 cnu = nu(0) * b.block[c][0] + nu(1) * b.block[c][1] + nu(2) * b.block[c][2];
    A.block<3, 3>(9, 3 * c) = -cnu;
    A.block<3, 3>(3 * c, 9) = -cnu.transpose();
  }
  A.bottomRightCorner<3, 3>() = (nu(0) + nu(1) + nu(2)) * Mat3::Identity();
  return A;
}

BoundaryPoint assemble_boundary(const ElasticTensor& C, const std::array<Mat15, 3>& A, const Vec3& nu) {
  if (std::abs(nu.norm() - 1.0) > 1e-12) throw PreconditionError("boundary normal must have unit length");
  BoundaryPoint bp;
  bp.normal = nu;
  bp.C_nu = assemble_C_nu(C, nu);
  bp.A_nu = nu(0) * A[0] + nu(1) * A[1] + nu(2) * A[2];
  bp.M = assemble_M(bp.C_nu);
  bp.ker_C_nu = kernel_basis(bp.C_nu);
  bp.ker_A_nu = kernel_basis(bp.A_nu);
  bp.ker_M = kernel_basis(bp.M);
  return bp;
}

NonnegativityReport check_maximal_nonnegative(const BoundaryPoint& bp, double tol) {
  NonnegativityReport r;
  double cscale = std::max(bp.ker_C_nu.sigma_max, 1e-300);
  double ascale = std::max(bp.ker_A_nu.sigma_max, 1e-300);

  const MatX& ZA = bp.ker_A_nu.basis;
  for (int c = 0; c < ZA.cols(); ++c) {
    Vec15 z = ZA.col(c);
    double v = std::max(z.segment<3>(9).cwiseAbs().maxCoeff(), z.segment<3>(12).cwiseAbs().maxCoeff());
    v = std::max(v, (bp.C_nu * z.head<9>()).cwiseAbs().maxCoeff() / cscale);
    r.ker_A_nu_residual = std::max(r.ker_A_nu_residual, v);
  }
  const MatX& ZC = bp.ker_C_nu.basis;
  for (int c = 0; c < ZC.cols(); ++c) {
    Vec15 z = Vec15::Zero();
    z.head<9>() = ZC.col(c);
    r.ker_A_nu_converse_residual = std::max(r.ker_A_nu_converse_residual, (bp.A_nu * z).cwiseAbs().maxCoeff() / ascale);
  }
  const MatX& ZM = bp.ker_M.basis;
  for (int c = 0; c < ZM.cols(); ++c) {
    Vec15 z = ZM.col(c);
    double v = z.segment<3>(12).cwiseAbs().maxCoeff();
    v = std::max(v, (bp.C_nu * z.head<9>()).cwiseAbs().maxCoeff() / cscale);
    r.ker_M_residual = std::max(r.ker_M_residual, v);
  }

  if (ZM.cols() > 0) {
    MatX Q = ZM.transpose() * bp.A_nu * ZM;
    Q = 0.5 * (Q + Q.transpose());
    Eigen::SelfAdjointEigenSolver<MatX> es(Q, Eigen::EigenvaluesOnly);
    r.min_quadratic = es.eigenvalues().minCoeff();
    r.max_abs_quadratic = es.eigenvalues().cwiseAbs().maxCoeff();
  }
  Eigen::SelfAdjointEigenSolver<Mat15> ea(bp.A_nu, Eigen::EigenvaluesOnly);
  double ecut = tol * std::max(ea.eigenvalues().cwiseAbs().maxCoeff(), 1.0);
  for (int i = 0; i < 15; ++i)
    if (ea.eigenvalues()(i) >= -ecut) ++r.nonnegative_eigenvalues;

  r.dim_ker_C_nu = bp.ker_C_nu.dim();
  r.dim_ker_A_nu = bp.ker_A_nu.dim();
  r.dim_ker_M = bp.ker_M.dim();
  r.nonnegative = r.min_quadratic >= -tol;
  r.maximal = r.dim_ker_M == r.nonnegative_eigenvalues;
  return r;
}

}  // namespace willis
