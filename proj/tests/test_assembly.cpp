#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "willis/assembly.hpp"

using namespace willis;

namespace {

MaterialSample constant_sample(const ElasticTensor& C, double rho, const CouplingTensor& S) {
  MaterialSample m;
  m.C = C;
  m.rho = rho;
  m.S = S;
  return m;
}

}  // namespace

TEST(Blocks, IsotropicEntries) {
  BlockSet b = elastic_blocks(make_isotropic(0.0, 0.5));
  Mat3 d = Mat3::Zero();
  d.diagonal() << 1.0, 0.5, 0.5;
  EXPECT_EQ(b.block[0][0], d);

  const double lam = 0.7, mu = 1.3;
  BlockSet c = elastic_blocks(make_isotropic(lam, mu));
  Mat3 e;
  e << 0, lam, 0, mu, 0, 0, 0, 0, 0;
  EXPECT_EQ(c.block[0][1], e);
  EXPECT_EQ(c.block[1][0], e.transpose());

  for (const auto& row : elastic_blocks(ElasticTensor::zero()).block)
    for (const Mat3& m : row) EXPECT_EQ(m, Mat3::Zero());
}

TEST(A0, MatchesIndexLoopOracle) {
  ElasticTensor C = make_isotropic(0.0, 0.5);
  Mat15 A0 = assemble_A0(C, 2.0);
  EXPECT_EQ(oracle::max_abs_diff(oracle::A0(C, 2.0), A0), 0.0);
  EXPECT_EQ((A0.block<3, 3>(9, 9)), 2.0 * Mat3::Identity());
  EXPECT_EQ((A0.topLeftCorner<9, 9>()), elastic_blocks(C).assembled());

  Mat15 Z = assemble_A0(ElasticTensor::zero(), 1.0);
  Mat15 expect = Mat15::Identity();
  expect.topLeftCorner<9, 9>().setZero();
  EXPECT_EQ(Z, expect);
  EXPECT_FALSE(inspect_A0(Z).positive_definite);
}

TEST(A0, RandomDrawsExactlySymmetric) {
  std::mt19937_64 rng(3);
  for (int q = 0; q < 100; ++q) {
    ElasticTensor C = oracle::random_elastic(rng);
    const double rho = 0.5 + std::uniform_real_distribution<double>(0.0, 2.0)(rng);
    Mat15 A0 = assemble_A0(C, rho);
    EXPECT_EQ((A0 - A0.transpose()).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(oracle::max_abs_diff(oracle::A0(C, rho), A0), 0.0);
    for (int k = 0; k < 3; ++k) {
      Mat15 A = assemble_Ak(C, k);
      EXPECT_EQ((A - A.transpose()).cwiseAbs().maxCoeff(), 0.0);
      EXPECT_EQ(oracle::max_abs_diff(oracle::Ak(C, k), A), 0.0);
    }
  }
}

TEST(Ak, ZeroAndIsotropic) {
  for (int k = 0; k < 3; ++k) {
    Mat15 A = assemble_Ak(ElasticTensor::zero(), k);
    Mat15 expect = Mat15::Zero();
    expect.bottomRightCorner<3, 3>().setIdentity();
    EXPECT_EQ(A, expect);
  }
  const double lam = 0.5, mu = 1.0;
  Mat15 A1 = assemble_Ak(make_isotropic(lam, mu), 0);
  Mat3 d = Mat3::Zero();
  d.diagonal() << -(lam + 2 * mu), -mu, -mu;
  EXPECT_EQ((A1.block<3, 3>(0, 9)), d);
}

TEST(F, Examples) {
  std::mt19937_64 rng(5);
  for (const Mat3& f : assemble_F(oracle::random_symmetric_coupling(rng))) EXPECT_EQ(f, Mat3::Zero());
  for (const Mat3& f : assemble_F(CouplingTensor::zero())) EXPECT_EQ(f, Mat3::Zero());
  CouplingTensor S;
  S(0, 1, 0) = 1.0;
  S(1, 0, 0) = 1.0;
  EXPECT_EQ(assemble_F(S)[0](0, 1), 1.0);
}

TEST(B, ConstantCoefficients) {
  std::mt19937_64 rng(9);
  Mat15 B = assemble_B(constant_sample(oracle::random_elastic(rng), 1.7, oracle::random_symmetric_coupling(rng)));
  EXPECT_EQ(B.topRows<12>(), (Eigen::Matrix<double, 12, 15>::Zero()));
  for (int a = 0; a < 3; ++a)
    for (int c = 0; c < 15; ++c) EXPECT_EQ(B(12 + a, c), (c % 3 == a && c < 12) ? -1.0 : 0.0);
}

TEST(B, DensityRateSign) {
  MaterialSample m = constant_sample(make_isotropic(1, 1), 1.0, CouplingTensor::zero());
  m.drho_t = 1.0;
  Mat15 B = assemble_B(m);
  // moving -d_t rho d_t u to the left gives +1 (see README)
  for (int a = 0; a < 3; ++a) EXPECT_EQ(B(9 + a, 9 + a), 1.0);
}

TEST(B, MatchesIndexLoopOracle) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-1, 1);
  MaterialSample m = constant_sample(oracle::random_elastic(rng), 1.2, oracle::random_symmetric_coupling(rng));
  m.drho_t = u(rng);
  for (int j = 0; j < 3; ++j) {
    m.dC[j] = oracle::random_elastic(rng);
    m.dS[j] = oracle::random_symmetric_coupling(rng);
  }
  m.dS_t = oracle::random_symmetric_coupling(rng);
  Mat15 B = assemble_B(m);
  for (int i = 0; i < 3; ++i) {
    for (int k = 0; k < 3; ++k)
      for (int l = 0; l < 3; ++l) {
        double d = m.dS_t(k, l, i);
        for (int j = 0; j < 3; ++j) d -= m.dC[j](i, j, k, l);
        EXPECT_EQ(B(9 + i, 3 * k + l), d);
      }
    for (int k = 0; k < 3; ++k) {
      double v = i == k ? m.drho_t : 0.0;
      for (int j = 0; j < 3; ++j) v -= m.dS[j](i, j, k);
      EXPECT_EQ(B(9 + i, 9 + k), v);
    }
  }
}

TEST(Unsymmetrized, Structure) {
  UnsymmetrizedSystem u = assemble_unsymmetrized(ElasticTensor::zero(), 3.0, CouplingTensor::zero());
  Mat15 expect = Mat15::Identity();
  expect.block<3, 3>(9, 9) = 3.0 * Mat3::Identity();
  EXPECT_EQ(u.A0, expect);

  std::mt19937_64 rng(17);
  UnsymmetrizedSystem v = assemble_unsymmetrized(make_isotropic(0.5, 1.0), 1.0, oracle::random_symmetric_coupling(rng));
  for (int k = 0; k < 3; ++k) EXPECT_EQ((v.A[k].block<3, 3>(9, 9)), Mat3::Zero());
  EXPECT_GT((v.A[0] - v.A[0].transpose()).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Symmetrize, EqualsDirectAssembly) {
  std::mt19937_64 rng(19);
  for (int q = 0; q < 100; ++q) {
    ElasticTensor C = q % 2 ? make_isotropic(0.3 + q * 0.01, 1.0) : oracle::random_elastic(rng);
    SymmetrizedSystem s = symmetrize(assemble_unsymmetrized(C, 1.5, oracle::random_symmetric_coupling(rng)), C);
    EXPECT_EQ(s.A0, assemble_A0(C, 1.5));
    for (int k = 0; k < 3; ++k) EXPECT_EQ(s.A[k], assemble_Ak(C, k));
  }
}

TEST(Symmetrize, ZeroStiffnessKeepsLowerRows) {
  SymmetrizedSystem s = symmetrize(assemble_unsymmetrized(ElasticTensor::zero(), 2.0, CouplingTensor::zero()),
                                   ElasticTensor::zero());
  EXPECT_EQ((s.transform.bottomRightCorner<6, 6>()), (Eigen::Matrix<double, 6, 6>::Identity()));
  UnsymmetrizedSystem u = assemble_unsymmetrized(ElasticTensor::zero(), 2.0, CouplingTensor::zero());
  EXPECT_EQ((s.A0.bottomRightCorner<6, 6>()), (u.A0.bottomRightCorner<6, 6>()));
}

TEST(Symmetrize, ObstructionListsEntries) {
  CouplingTensor S;
  S(0, 1, 0) = 1.0;
  S(1, 0, 0) = 1.0;
  ElasticTensor C = make_isotropic(0.5, 1.0);
  try {
    symmetrize(assemble_unsymmetrized(C, 1.0, S), C);
    FAIL() << "expected an obstruction";
  } catch (const SymmetrizationObstruction& e) {
    ASSERT_FALSE(e.entries().empty());
    bool found = false;
    for (const FEntry& f : e.entries()) found = found || (f.matrix == 0 && f.row == 0 && f.col == 1 && f.value == 1.0);
    EXPECT_TRUE(found);
  }
}

TEST(H, Examples) {
  std::mt19937_64 rng(23);
  ElasticTensor C = oracle::random_elastic(rng);
  EXPECT_EQ(assemble_H(C, CouplingTensor::zero(), 1.0).c, C.c);
  CouplingTensor S;
  S(0, 0, 0) = 1.0;
  HTensor H = assemble_H(ElasticTensor::zero(), S, 1.0);
  for (int e = 0; e < 81; ++e) EXPECT_EQ(H.c[e], e == 0 ? -1.0 : 0.0);

  CouplingTensor R = oracle::random_symmetric_coupling(rng);
  const double rho = 1.7;
  HTensor G = assemble_H(C, R, rho);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          double v = 0.0;
          for (int m = 0; m < 3; ++m) v += R(i, j, m) * R(k, l, m);
          EXPECT_NEAR(G(i, j, k, l), C(i, j, k, l) - v / rho, 1e-15);
        }
}

TEST(BoundarySource, ZeroAndRigidDrift) {
  MaterialSpec spec = MaterialSpec::isotropic(1.0, 0.5, 1.0, MaterialSpec::coupling_zero());
  MaterialSample m = spec.sample(0.1, 0.2, 0.3, 0.4);
  EXPECT_EQ(boundary_source_e(BoundaryLift().sample(0.1, 0.2, 0.3, 0.4), m), Vec3::Zero());
  std::mt19937_64 rng(29);
  MaterialSpec coupled = spec.with_coupling(MaterialSpec::coupling_constant(oracle::random_symmetric_coupling(rng)));
  BoundaryLift drift({Expr::parse("t"), 0.0, 0.0});
  EXPECT_EQ(boundary_source_e(drift.sample(0.1, 0.2, 0.3, 0.4), coupled.sample(0.1, 0.2, 0.3, 0.4)), Vec3::Zero());
}

// rho e_i = d_t mu_i(ubar) - d_j sigma_ij(ubar), with sigma = C eps + S d_t u and
// mu = rho d_t u + S_kli eps_kl, differentiated symbolically.
TEST(BoundarySource, MatchesBalanceLawOracle) {
  std::array<Expr, 10> p;
  const char* sp[10] = {"0.1*x", "0.05*t", "0.02", "0.03*y", "0", "0.01*z*t", "0.04", "0.02*x*y", "0", "0.05*z"};
  for (int i = 0; i < 10; ++i) p[i] = Expr::parse(sp[i]);
  MaterialSpec spec = MaterialSpec::isotropic(Expr::parse("2 + 0.1*x*t"), Expr::parse("0.5 + 0.1*y"),
                                              Expr::parse("1 + 0.2*z^2"), MaterialSpec::coupling_totally_symmetric(p));
  std::array<Expr, 3> ub{Expr::parse("x^2*y*t + t^2*z"), Expr::parse("0.3*x*z^2 + t^3"), Expr::parse("y^2*t*x")};
  const Var ax[3] = {Var::x1, Var::x2, Var::x3};
  Expr eps[3][3];
  for (int k = 0; k < 3; ++k)
    for (int l = 0; l < 3; ++l) eps[k][l] = 0.5 * (ub[l].diff(ax[k]) + ub[k].diff(ax[l]));
  const Point4 x{0.3, -0.2, 0.5, 0.7};
  MaterialSample m = spec.sample(x[0], x[1], x[2], x[3]);
  Vec3 e = boundary_source_e(BoundaryLift(ub).sample(x[0], x[1], x[2], x[3]), m);
  for (int i = 0; i < 3; ++i) {
    Expr mu = spec.rho() * ub[i].diff(Var::t);
    for (int k = 0; k < 3; ++k)
      for (int l = 0; l < 3; ++l) mu = mu + spec.S(k, l, i) * eps[k][l];
    Expr div = 0.0;
    for (int j = 0; j < 3; ++j) {
      Expr sigma = 0.0;
      for (int k = 0; k < 3; ++k) {
        sigma = sigma + spec.S(i, j, k) * ub[k].diff(Var::t);
        for (int l = 0; l < 3; ++l) sigma = sigma + spec.C(i, j, k, l) * eps[k][l];
      }
      div = div + sigma.diff(ax[j]);
    }
    const double re = mu.diff(Var::t).eval(x) - div.eval(x);
    EXPECT_NEAR(m.rho * e(i), re, 1e-13 * std::max(1.0, std::abs(re)));
  }
}

TEST(W, Layout) {
  MaterialSample m;
  m.rho = 2.0;
  EXPECT_EQ(assemble_w(m, Vec3::Zero()), Vec15::Zero());
  Vec15 w = assemble_w(m, Vec3(1, 0, 0));
  Vec15 expect = Vec15::Zero();
  expect(9) = -2.0;  // -rho e, see README
  EXPECT_EQ(w, expect);
  Vec15 any = assemble_w(m, Vec3(0.3, -1.2, 4.0));
  EXPECT_EQ(any.head<9>(), Vec9::Zero());
  EXPECT_EQ(any.tail<3>(), Vec3::Zero());
}

TEST(A0, DefinitenessFollowsMuMinusLambda) {
  for (double lam : {-0.3, 0.0, 0.5, 0.99, 1.0, 1.5})
    for (double mu : {0.5, 1.0, 2.0}) {
      A0Report r = inspect_A0(assemble_A0(make_isotropic(lam, mu), 1.0));
      if (mu > lam + 1e-9) EXPECT_TRUE(r.positive_definite) << lam << " " << mu;
      else EXPECT_FALSE(r.positive_definite) << lam << " " << mu;
    }
}

TEST(A0, SweepMatchesJacobiAndFixture) {
  std::ifstream in(FIXTURE_DIR "/a0_definiteness_sweep.csv");
  ASSERT_TRUE(in.good());
  std::string line;
  std::getline(in, line);
  std::vector<double> lams, mus;
  std::vector<std::array<double, 5>> rows;
  while (std::getline(in, line)) {
    std::array<double, 5> r;
    std::stringstream ss(line);
    for (double& v : r) {
      std::string cell;
      std::getline(ss, cell, ',');
      v = std::stod(cell);
    }
    rows.push_back(r);
    if (std::find(lams.begin(), lams.end(), r[0]) == lams.end()) lams.push_back(r[0]);
    if (std::find(mus.begin(), mus.end(), r[1]) == mus.end()) mus.push_back(r[1]);
  }
  std::sort(mus.begin(), mus.end());
  std::vector<A0SweepPoint> sweep = a0_definiteness_sweep(lams, mus);
  ASSERT_EQ(sweep.size(), rows.size());
  for (std::size_t q = 0; q < rows.size(); ++q) {
    const A0SweepPoint& p = sweep[q];
    EXPECT_EQ(p.lambda, rows[q][0]);
    EXPECT_EQ(p.mu, rows[q][1]);
    EXPECT_EQ(p.sign, static_cast<int>(rows[q][4])) << p.lambda << " " << p.mu;
    std::vector<double> ev = oracle::jacobi_eigenvalues(oracle::A0(make_isotropic(p.lambda, p.mu), 1.0));
    const double scale = std::max(std::abs(ev.front()), std::abs(ev.back()));
    EXPECT_LE(std::abs(p.min_eigenvalue - ev.front()), 1e-10 * scale);
    EXPECT_LE(std::abs(p.min_eigenvalue - rows[q][2]), 1e-10 * scale);
  }
}

TEST(Boundary, AxisNormalStructure) {
  ElasticTensor C = make_isotropic(0.5, 1.0);
  std::array<Mat15, 3> A{assemble_Ak(C, 0), assemble_Ak(C, 1), assemble_Ak(C, 2)};
  BoundaryPoint bp = assemble_boundary(C, A, Vec3(1, 0, 0));
  EXPECT_EQ(bp.C_nu.middleRows<6>(3), (Eigen::Matrix<double, 6, 9>::Zero()));
  Eigen::FullPivLU<Mat9> lu(bp.C_nu);
  EXPECT_LE(lu.rank(), 3);
  EXPECT_GE(bp.ker_C_nu.dim(), 6);
  EXPECT_EQ(bp.A_nu, A[0]);
  EXPECT_EQ(bp.A_nu, assemble_A_nu_blocks(C, Vec3(1, 0, 0)));
}

TEST(Boundary, ZeroStiffness) {
  ElasticTensor Z = ElasticTensor::zero();
  std::array<Mat15, 3> A{assemble_Ak(Z, 0), assemble_Ak(Z, 1), assemble_Ak(Z, 2)};
  Vec3 nu = Vec3(1, 2, 2) / 3.0;
  BoundaryPoint bp = assemble_boundary(Z, A, nu);
  Mat15 expect = Mat15::Zero();
  expect.bottomRightCorner<3, 3>() = (nu.sum()) * Mat3::Identity();
  EXPECT_NEAR((bp.A_nu - expect).cwiseAbs().maxCoeff(), 0.0, 1e-15);
  NonnegativityReport r = check_maximal_nonnegative(bp);
  EXPECT_EQ(r.dim_ker_M, 12);
  EXPECT_TRUE(r.nonnegative);
}

TEST(Boundary, KernelCharacterizationOnFaces) {
  std::mt19937_64 rng(31);
  std::vector<ElasticTensor> Cs{make_isotropic(0.5, 1.0), make_isotropic(1.0, 1.0), oracle::random_elastic(rng)};
  for (const ElasticTensor& C : Cs) {
    std::array<Mat15, 3> A{assemble_Ak(C, 0), assemble_Ak(C, 1), assemble_Ak(C, 2)};
    int dim = -1;
    for (int f = 0; f < 6; ++f) {
      Vec3 nu = Vec3::Zero();
      nu(f / 2) = f % 2 ? 1.0 : -1.0;
      BoundaryPoint bp = assemble_boundary(C, A, nu);
      NonnegativityReport r = check_maximal_nonnegative(bp);
      EXPECT_LE(r.ker_A_nu_residual, 1e-10);
      EXPECT_LE(r.ker_M_residual, 1e-10);
      EXPECT_LE(r.ker_A_nu_converse_residual, 1e-10);
      EXPECT_LE(r.max_abs_quadratic, 1e-10);
      // every ker(A_nu) basis vector has zero z4, z5 blocks
      for (int c = 0; c < bp.ker_A_nu.dim(); ++c) EXPECT_LE(bp.ker_A_nu.basis.col(c).tail<6>().norm(), 1e-10);
      if (dim < 0) dim = r.dim_ker_C_nu;
      EXPECT_EQ(r.dim_ker_C_nu, dim);
    }
  }
}

TEST(Boundary, ObliqueNormalKernelsDiffer) {
  ElasticTensor C = make_isotropic(0.5, 1.0);
  std::array<Mat15, 3> A{assemble_Ak(C, 0), assemble_Ak(C, 1), assemble_Ak(C, 2)};
  BoundaryPoint bp = assemble_boundary(C, A, Vec3(1, 1, 0).normalized());
  EXPECT_LT(bp.ker_C_nu.dim(), bp.ker_A_nu.dim());
  EXPECT_THROW(assemble_boundary(C, A, Vec3(1, 1, 0)), PreconditionError);
}
