#pragma once

#include <Eigen/Dense>

namespace willis {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Mat9 = Eigen::Matrix<double, 9, 9>;
using Vec9 = Eigen::Matrix<double, 9, 1>;
using Mat15 = Eigen::Matrix<double, 15, 15>;
using Vec15 = Eigen::Matrix<double, 15, 1>;
using MatX = Eigen::MatrixXd;

// Orthonormal basis (columns) of the numerical kernel of m.  Singular values
// below rel_threshold * sigma_max count as zero; a zero matrix has the whole
// space as kernel.
struct KernelBasis {
  MatX basis;
  int rank = 0;
  double sigma_max = 0.0;
  int dim() const { return static_cast<int>(basis.cols()); }
};

KernelBasis kernel_basis(const MatX& m, double rel_threshold = 1e-10);

double spectral_norm(const MatX& m);
double min_symmetric_eigenvalue(const MatX& m);

}  // namespace willis
