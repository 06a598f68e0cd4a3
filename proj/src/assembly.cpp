#include "willis/assembly.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace willis {

Mat9 BlockSet::assembled() const {
  Mat9 m;
  for (int k = 0; k < 3; ++k)
    for (int j = 0; j < 3; ++j) m.block<3, 3>(3 * k, 3 * j) = block[j][k];
  return m;
}

BlockSet elastic_blocks(const ElasticTensor& C) {
  BlockSet b;
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k)
      for (int a = 0; a < 3; ++a)
        for (int c = 0; c < 3; ++c) b.block[j][k](a, c) = C(a, j, c, k);
  return b;
}

Mat15 assemble_A0(const ElasticTensor& C, double rho) {
  if (!(rho > 0.0)) throw PreconditionError("A0 needs rho > 0");
  Mat15 A = Mat15::Zero();
  A.topLeftCorner<9, 9>() = elastic_blocks(C).assembled();
  for (int a = 0; a < 3; ++a) {
    A(9 + a, 9 + a) = rho;
    A(12 + a, 12 + a) = 1.0;
  }
  return A;
}

Mat15 assemble_Ak(const ElasticTensor& C, int k) {
  Mat15 A = Mat15::Zero();
  for (int c = 0; c < 3; ++c)
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        // row block 4, column block c: -C_c^k
        double v = -C(a, c, b, k);
        A(9 + a, 3 * c + b) = v;
        A(3 * c + b, 9 + a) = v;
      }
  for (int a = 0; a < 3; ++a) A(12 + a, 12 + a) = 1.0;
  return A;
}

std::array<Mat3, 3> assemble_F(const CouplingTensor& S) {
  std::array<Mat3, 3> F;
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k) F[j](i, k) = S(j, k, i) - S(i, j, k);
  return F;
}

Eigen::Matrix<double, 3, 9> assemble_D(const MaterialSample& m) {
  Eigen::Matrix<double, 3, 9> D;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k)
      for (int l = 0; l < 3; ++l) {
        double v = m.dS_t(k, l, i);
        for (int j = 0; j < 3; ++j) v -= m.dC[j](i, j, k, l);
        D(i, 3 * k + l) = v;
      }
  return D;
}

Mat3 assemble_velocity_block(const MaterialSample& m) {
  Mat3 V;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) {
      double v = i == k ? m.drho_t : 0.0;
      for (int j = 0; j < 3; ++j) v -= m.dS[j](i, j, k);
      V(i, k) = v;
    }
  return V;
}

Mat15 assemble_B(const MaterialSample& m) {
  Mat15 B = Mat15::Zero();
  B.block<3, 9>(9, 0) = assemble_D(m);
  B.block<3, 3>(9, 9) = assemble_velocity_block(m);
  for (int c = 0; c < 4; ++c)
    for (int a = 0; a < 3; ++a) B(12 + a, 3 * c + a) = -1.0;
  return B;
}

UnsymmetrizedSystem assemble_unsymmetrized(const ElasticTensor& C, double rho, const CouplingTensor& S) {
  UnsymmetrizedSystem u;
  u.A0 = Mat15::Identity();
  for (int a = 0; a < 3; ++a) u.A0(9 + a, 9 + a) = rho;
  auto F = assemble_F(S);
  for (int k = 0; k < 3; ++k) {
    Mat15& A = u.A[k];
    A.setZero();
    // compatibility rows for axis k: d_t G_k - d_k v_t
    for (int a = 0; a < 3; ++a) A(3 * k + a, 9 + a) = -1.0;
    for (int c = 0; c < 3; ++c)
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) A(9 + a, 3 * c + b) = -C(a, c, b, k);
    A.block<3, 3>(9, 9) = F[k];
    for (int a = 0; a < 3; ++a) A(12 + a, 12 + a) = 1.0;
  }
  return u;
}

Mat15 symmetrization_transform(const ElasticTensor& C) {
  Mat15 T = Mat15::Identity();
  // new row (r, a) = sum_{k,b} C_{b r a k} * (compatibility row (k, b))
  for (int r = 0; r < 3; ++r)
    for (int a = 0; a < 3; ++a)
      for (int k = 0; k < 3; ++k)
        for (int b = 0; b < 3; ++b) T(3 * r + a, 3 * k + b) = C(b, r, a, k);
  return T;
}

SymmetrizedSystem symmetrize(const UnsymmetrizedSystem& sys, const ElasticTensor& C) {
  std::vector<FEntry> bad;
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double f = sys.A[k](9 + i, 9 + j);
        if (f != 0.0) bad.push_back({k, i, j, f});
      }
  if (!bad.empty()) {
    std::ostringstream os;
    os << "not symmetrizable: coupling tensor violates S_ijk = S_jki, nonzero F entries:";
    for (auto& e : bad) os << " F" << e.matrix + 1 << "[" << e.row + 1 << "," << e.col + 1 << "]=" << e.value;
    throw SymmetrizationObstruction(os.str(), std::move(bad));
  }
  SymmetrizedSystem s;
  s.transform = symmetrization_transform(C);
  s.A0 = s.transform * sys.A0;
  for (int k = 0; k < 3; ++k) s.A[k] = s.transform * sys.A[k];
  return s;
}

HTensor assemble_H(const ElasticTensor& C, const CouplingTensor& S, double rho) {
  if (!(rho > 0.0)) throw PreconditionError("H tensor needs rho > 0");
  HTensor H;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          double ss = 0.0;
          for (int m = 0; m < 3; ++m) ss += S(i, j, m) * S(k, l, m);
          H(i, j, k, l) = C(i, j, k, l) - ss / rho;
        }
  return H;
}

Vec3 boundary_source_e(const LiftSample& ub, const MaterialSample& m) {
  Vec3 re;
  for (int i = 0; i < 3; ++i) {
    double v = m.drho_t * ub.ut(i) + m.rho * ub.utt(i);
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        v -= m.dS[j](i, j, k) * ub.ut(k);
        v += (m.S(j, k, i) - m.S(i, j, k)) * ub.grad_t(j, k);
        for (int l = 0; l < 3; ++l) v -= m.C(i, j, k, l) * ub.hess[l](j, k);
      }
    for (int k = 0; k < 3; ++k)
      for (int l = 0; l < 3; ++l) {
        double coef = m.dS_t(k, l, i);
        for (int j = 0; j < 3; ++j) coef -= m.dC[j](i, j, k, l);
        v += coef * ub.grad(k, l);
      }
    re(i) = v;
  }
  return re / m.rho;
}

Vec15 assemble_w(const MaterialSample& m, const Vec3& e) {
  Vec15 w = Vec15::Zero();
  w.segment<3>(9) = -m.rho * e;
  return w;
}

PointSystem assemble_point(const MaterialSample& m, const LiftSample& lift) {
  PointSystem p;
  p.A0 = assemble_A0(m.C, m.rho);
  for (int k = 0; k < 3; ++k) p.A[k] = assemble_Ak(m.C, k);
  p.B = assemble_B(m);
  p.w = assemble_w(m, boundary_source_e(lift, m));
  return p;
}

A0Report inspect_A0(const Mat15& A0, double rel_tol) {
  Eigen::SelfAdjointEigenSolver<Mat15> es(A0, Eigen::EigenvaluesOnly);
  A0Report r;
  r.min_eigenvalue = es.eigenvalues()(0);
  r.max_abs_eigenvalue = es.eigenvalues().cwiseAbs().maxCoeff();
  r.positive_definite = r.min_eigenvalue > rel_tol * r.max_abs_eigenvalue;
  return r;
}

std::vector<A0SweepPoint> a0_definiteness_sweep(const std::vector<double>& lambdas, const std::vector<double>& mus,
                                                double rho, double rel_tol) {
  std::vector<A0SweepPoint> out;
  for (double lam : lambdas)
    for (double mu : mus) {
      if (!(mu > 0.0) || !(3.0 * lam + 2.0 * mu > 0.0)) continue;
      A0Report r = inspect_A0(assemble_A0(make_isotropic(lam, mu), rho), rel_tol);
      A0SweepPoint p{lam, mu, r.min_eigenvalue, r.max_abs_eigenvalue, 0};
      if (r.positive_definite) p.sign = 1;
      else if (std::abs(r.min_eigenvalue) > rel_tol * r.max_abs_eigenvalue) p.sign = -1;
      out.push_back(p);
    }
  return out;
}

}  // namespace willis
