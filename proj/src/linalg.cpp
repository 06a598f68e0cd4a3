#include "willis/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace willis {

KernelBasis kernel_basis(const MatX& m, double rel_threshold) {
  KernelBasis k;
  Eigen::JacobiSVD<MatX> svd(m, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  k.sigma_max = s.size() ? s(0) : 0.0;
  double cut = rel_threshold * k.sigma_max;
  int rank = 0;
  if (k.sigma_max > 0.0)
    for (int i = 0; i < s.size(); ++i)
      if (s(i) > cut) ++rank;
  k.rank = rank;
  k.basis = svd.matrixV().rightCols(m.cols() - rank);
  return k;
}

double spectral_norm(const MatX& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<MatX> svd(m);
  return svd.singularValues()(0);
}

double min_symmetric_eigenvalue(const MatX& m) {
  Eigen::SelfAdjointEigenSolver<MatX> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

}  // namespace willis
