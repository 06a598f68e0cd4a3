#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "willis/solver.hpp"
#include "willis/state.hpp"

using namespace willis;

namespace {

const double kPi = std::numbers::pi;

MaterialSpec plain(double lam = 0.5, double mu = 1.0, double rho = 1.0) {
  return MaterialSpec::isotropic(rho, lam, mu, MaterialSpec::coupling_zero());
}

// smooth, time-dependent, totally symmetric coupling and varying rho, C
MaterialSpec varying() {
  std::array<Expr, 10> p;
  for (int i = 0; i < 10; ++i) p[i] = Expr::parse("0.05*sin(2*pi*x) + 0.02*cos(2*pi*(y+z))*(1+t)") * (0.1 * (i + 1));
  return MaterialSpec::isotropic(Expr::parse("1.2 + 0.1*sin(2*pi*(x+y))"), Expr::parse("0.4 + 0.05*cos(2*pi*z)"),
                                 Expr::parse("1 + 0.1*sin(2*pi*y)*(1+0.5*t)"), MaterialSpec::coupling_totally_symmetric(p));
}

Field random_field(const Grid& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  Field f(g, 15);
  for (double& x : f.raw()) x = u(rng);
  return f;
}

}  // namespace

TEST(Operator, ConstantStateConstantCoefficients) {
  Grid g = Grid::cube(0, 1, 8, BoundaryMode::periodic);
  MaterialSpec s = plain();
  BoundaryLift lift;
  WillisOperator op(g, s, lift, SchemeConfig{});
  // constant gradient, velocity and u~ consistent with the auxiliary rows
  Field v(g, 15);
  for (std::size_t p = 0; p < g.size(); ++p) {
    for (int c = 0; c < 9; ++c) v.at(c, p) = 0.0;
    for (int a = 0; a < 3; ++a) v.at(12 + a, p) = 0.3 * (a + 1);
  }
  Field dv(g, 15);
  op.apply(v, 0.0, dv);
  EXPECT_LE(dv.max_abs(), 1e-15);
}

TEST(Operator, FourierSymbol) {
  for (int order : {2, 4}) {
    const int n = 16;
    Grid g = Grid::cube(0, 1, n, BoundaryMode::periodic);
    const double h = g.h(0);
    MaterialSpec s = plain();
    BoundaryLift lift;
    SchemeConfig sc;
    sc.order = order;
    WillisOperator op(g, s, lift, sc);
    const int kap[3] = {1, 2, -1};
    Vec15 z;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int i = 0; i < 15; ++i) z(i) = u(rng);
    Field v(g, 15);
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          Vec3 x = g.point(i, j, k);
          v.set_state(g.index(i, j, k), z * std::cos(2 * kPi * (kap[0] * x(0) + kap[1] * x(1) + kap[2] * x(2))));
        }
    Field dv(g, 15);
    op.apply(v, 0.0, dv);
    MaterialSample m = s.sample(0, 0, 0, 0);
    Mat15 A0 = assemble_A0(m.C, m.rho), B = assemble_B(m);
    Eigen::LDLT<Mat15> ldlt(A0);
    // exact discrete symbols of the central stencils, and the continuum one
    Vec15 sym_disc = Vec15::Zero(), sym_cont = Vec15::Zero();
    for (int a = 0; a < 3; ++a) {
      const double th = 2 * kPi * kap[a] * h;
      const double sd = order == 2 ? std::sin(th) / h : (8 * std::sin(th) - std::sin(2 * th)) / (6 * h);
      sym_disc += sd * (assemble_Ak(m.C, a) * z);
      sym_cont += 2 * kPi * kap[a] * (assemble_Ak(m.C, a) * z);
    }
    double err_disc = 0.0, err_cont = 0.0, scale = 0.0;
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          Vec3 x = g.point(i, j, k);
          const double ph = 2 * kPi * (kap[0] * x(0) + kap[1] * x(1) + kap[2] * x(2));
          Vec15 e_disc = ldlt.solve(sym_disc * std::sin(ph) - B * z * std::cos(ph));
          Vec15 e_cont = ldlt.solve(sym_cont * std::sin(ph) - B * z * std::cos(ph));
          Vec15 got = dv.state(g.index(i, j, k));
          err_disc = std::max(err_disc, (got - e_disc).cwiseAbs().maxCoeff());
          err_cont = std::max(err_cont, (got - e_cont).cwiseAbs().maxCoeff());
          scale = std::max(scale, e_cont.cwiseAbs().maxCoeff());
        }
    EXPECT_LE(err_disc, 1e-11 * scale) << "order " << order;
    const double kh = 2 * kPi * 2 * h;
    EXPECT_LE(err_cont, 2.0 * std::pow(kh, order) * scale) << "order " << order;
  }
}

TEST(Operator, ParallelMatchesReference) {
  MaterialSpec s = varying();
  BoundaryLift lift({Expr::parse("0.01*t*sin(2*pi*x)"), 0.0, Expr::parse("0.02*t^2")});
  for (BoundaryMode mode : {BoundaryMode::periodic, BoundaryMode::bounded_box})
    for (int order : {2, 4}) {
      Grid g = Grid::cube(0, 1, 10, mode);
      SchemeConfig sc;
      sc.order = order;
      sc.dissipation = 0.1;
      WillisOperator op(g, s, lift, sc);
      Field v = random_field(g, 6);
      Field a(g, 15), b(g, 15);
      op.apply(v, 0.3, a);
      op.apply_reference(v, 0.3, b);
      Field d = a;
      d.axpy(-1.0, b);
      EXPECT_LE(d.max_abs(), 1e-12 * b.max_abs()) << "order " << order;
    }
}

TEST(Operator, RefusesSingularA0) {
  Grid g = Grid::cube(0, 1, 8, BoundaryMode::periodic);
  MaterialSpec s = plain(1.0, 1.0);
  BoundaryLift lift;
  WillisOperator op(g, s, lift, SchemeConfig{});
  EXPECT_THROW(op.check_A0(0.0), SingularA0Error);
  EXPECT_NO_THROW(op.check_A0(0.0, true));
  RunOptions ro;
  ro.T = 0.01;
  EXPECT_THROW(run(op, Field(g, 15), ro), SingularA0Error);
}

TEST(Speeds, ChristoffelOracle) {
  for (double rho : {1.0, 4.0}) {
    ElasticTensor C = make_isotropic(0.5, 1.0);
    const double n[3] = {0.0, 0.6, 0.8};
    Vec3 nu(n[0], n[1], n[2]);
    Mat15 A_nu = nu(0) * assemble_Ak(C, 0) + nu(1) * assemble_Ak(C, 1) + nu(2) * assemble_Ak(C, 2);
    Eigen::VectorXd sp = characteristic_speeds(assemble_A0(C, rho), A_nu);
    std::array<double, 3> c = oracle::christoffel_speeds(C, rho, n);
    auto count = [&](double v) {
      int k = 0;
      for (int i = 0; i < sp.size(); ++i) k += std::abs(sp(i) - v) < 1e-10;
      return k;
    };
    for (double v : c) {
      EXPECT_GE(count(v), 1) << v;
      EXPECT_GE(count(-v), 1) << v;
    }
    EXPECT_NEAR(c[2], std::sqrt(2.5 / rho), 1e-12);
    EXPECT_NEAR(c[0], std::sqrt(1.0 / rho), 1e-12);
    // auxiliary displacement block, independent of rho
    EXPECT_GE(count(nu.sum()), 3);
    EXPECT_EQ(count(0.0), 6);
  }
}

TEST(Speeds, ZeroStiffness) {
  Mat15 A0 = Mat15::Identity();
  Vec3 nu(0.0, 0.6, 0.8);
  Mat15 A_nu = Mat15::Zero();
  A_nu.bottomRightCorner<3, 3>() = nu.sum() * Mat3::Identity();
  Eigen::VectorXd sp = characteristic_speeds(A0, A_nu);
  for (int i = 0; i < 12; ++i) EXPECT_NEAR(sp(i), 0.0, 1e-14);
  for (int i = 12; i < 15; ++i) EXPECT_NEAR(sp(i), 1.4, 1e-14);
}

TEST(Speeds, MaxSpeedAndUnitIsotropic) {
  Grid g = Grid::cube(0, 1, 8, BoundaryMode::periodic);
  EXPECT_NEAR(max_characteristic_speed(g, plain(), 0.0), std::sqrt(2.5), 1e-12);
  EXPECT_NEAR(max_characteristic_speed(g, plain(), 0.0, true), std::sqrt(3.0), 1e-12);
  // lambda = mu = 1: A0 singular, so the pencil is undefined
  EXPECT_THROW(max_characteristic_speed(g, plain(1.0, 1.0), 0.0), SingularA0Error);
}

TEST(Cfl, Formula) {
  EXPECT_NEAR(cfl_dt(0.1, 2.0, 0.5), 0.5 * 0.1 / 6.0, 1e-17);
  EXPECT_DOUBLE_EQ(cfl_dt(0.05, 2.0, 0.5), 0.5 * cfl_dt(0.1, 2.0, 0.5));
}

TEST(Support, Radius) {
  Grid g = Grid::cube(-1, 1, 8, BoundaryMode::periodic);
  Field f(g, 15);
  EXPECT_EQ(support_radius(g, f, 0.0), 0.0);
  f.at(3, g.index(6, 4, 4)) = 1.0;
  EXPECT_DOUBLE_EQ(support_radius(g, f, 0.5), g.point(6, 4, 4).norm());
}

TEST(Support, BumpRadius) {
  Grid g = Grid::cube(-1, 1, 32, BoundaryMode::periodic);
  MaterialSpec s = plain();
  BoundaryLift lift;
  InitialData d;
  d.u0 = {Expr::parse("exp(-(x^2+y^2+z^2))*pos(1 - (x^2+y^2+z^2)/0.25)^3"), 0.0, 0.0};
  Field v = InitialStateBuilder(d, lift, s).field(g);
  EXPECT_NEAR(support_radius(g, v, 0.0), 0.5, g.h(0));
}

TEST(Step, ZeroStaysZero) {
  Grid g = Grid::cube(0, 1, 8, BoundaryMode::periodic);
  MaterialSpec s = plain();
  BoundaryLift lift;
  WillisOperator op(g, s, lift, SchemeConfig{});
  Field v(g, 15);
  rk4_step(op, KernelKind::parallel, v, 0.0, 0.01);
  EXPECT_EQ(v.max_abs(), 0.0);
  RunOptions ro;
  ro.T = 0.05;
  Trajectory tr = run(op, v, ro);
  EXPECT_EQ(tr.final_state.max_abs(), 0.0);
  for (double e : tr.energy) EXPECT_EQ(e, 0.0);
}

// P wave u1 = sin(2 pi (x - c t)) with c = sqrt(lambda + 2 mu)
TEST(Step, PlaneWaveTranslates) {
  const double c = std::sqrt(2.5), T = 0.2;
  InitialData d;
  d.u0 = {Expr::parse("sin(2*pi*x)"), 0.0, 0.0};
  d.mu0 = {Expr::parse("-2*pi*cos(2*pi*x)") * c, 0.0, 0.0};
  std::array<double, 2> err{};
  for (int q = 0; q < 2; ++q) {
    const int n = q ? 32 : 16;
    Grid g = Grid::cube(0, 1, n, BoundaryMode::periodic);
    MaterialSpec s = plain();
    BoundaryLift lift;
    WillisOperator op(g, s, lift, SchemeConfig{});
    RunOptions ro;
    ro.T = T;
    ro.keep_snapshots = false;
    Trajectory tr = run(op, InitialStateBuilder(d, lift, s).field(g), ro);
    double e = 0.0;
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          const double exact = std::sin(2 * kPi * (g.coord(0, i) - c * T));
          e = std::max(e, std::abs(tr.final_state.at(12, g.index(i, j, k)) - exact));
        }
    err[q] = e;
  }
  EXPECT_LE(err[0], 0.05);
  EXPECT_GE(err[0] / err[1], 3.5);
}

TEST(Step, EnergyGrowthWithinBound) {
  Grid g = Grid::cube(0, 1, 10, BoundaryMode::periodic);
  MaterialSpec s = varying();
  BoundaryLift lift;
  WillisOperator op(g, s, lift, SchemeConfig{});
  InitialData d;
  d.u0 = {Expr::parse("0.1*sin(2*pi*x)*cos(2*pi*y)"), Expr::parse("0.1*sin(2*pi*z)"), 0.0};
  Field v = InitialStateBuilder(d, lift, s).field(g);
  const double dt = cfl_dt(g.h_min(), max_characteristic_speed(g, s, 0.0), 0.4);
  double t = 0.0;
  for (int n = 0; n < 10; ++n) {
    const double C = coefficient_bound(g, s, t);
    const double E0 = energy(op, v, t);
    rk4_step(op, KernelKind::parallel, v, t, dt);
    t += dt;
    EXPECT_LE(energy(op, v, t), E0 * (1.0 + C * dt));
  }
}

TEST(Run, DeterministicTraces) {
  Grid g = Grid::cube(-1, 1, 12, BoundaryMode::periodic);
  MaterialSpec s = varying();
  BoundaryLift lift;
  WillisOperator op(g, s, lift, SchemeConfig{});
  InitialData d;
  d.u0 = {Expr::parse("pos(1 - (x^2+y^2+z^2)/0.3)^4"), 0.0, 0.0};
  Field v0 = InitialStateBuilder(d, lift, s).field(g);
  RunOptions ro;
  ro.T = 0.05;
  Trajectory a = run(op, v0, ro), b = run(op, v0, ro);
  EXPECT_EQ(a.energy, b.energy);
  EXPECT_EQ(a.radius, b.radius);
  EXPECT_EQ(a.final_state.raw(), b.final_state.raw());
  ro.kernel = KernelKind::reference;
  Trajectory r = run(op, v0, ro);
  Field diff = r.final_state;
  diff.axpy(-1.0, a.final_state);
  EXPECT_LE(diff.max_abs(), 1e-12 * a.final_state.max_abs());
}

TEST(Run, SnapshotCadence) {
  Grid g = Grid::cube(0, 1, 8, BoundaryMode::periodic);
  MaterialSpec s = plain();
  BoundaryLift lift;
  WillisOperator op(g, s, lift, SchemeConfig{});
  RunOptions ro;
  ro.T = 0.1;
  ro.snapshot_every = 3;
  Trajectory tr = run(op, Field(g, 15), ro);
  EXPECT_NEAR(tr.times.back(), 0.1, 1e-14);
  EXPECT_EQ(tr.snapshot_times.front(), 0.0);
  EXPECT_NEAR(tr.snapshot_times.back(), 0.1, 1e-14);
  EXPECT_EQ(tr.snapshots.size(), tr.snapshot_times.size());
  EXPECT_EQ(static_cast<int>(tr.times.size()), tr.steps + 1);
}

TEST(Run, BoundedTrajectoryStaysBounded) {
  Grid g = Grid::cube(0, 1, 10, BoundaryMode::bounded_box);
  MaterialSpec s = plain();
  BoundaryLift lift;
  WillisOperator op(g, s, lift, SchemeConfig{});
  InitialData d;
  d.u0 = {Expr::parse("(sin(pi*x)*sin(pi*y)*sin(pi*z))^3"), 0.0, 0.0};
  RunOptions ro;
  ro.T = 0.5;
  ro.keep_snapshots = false;
  Trajectory tr = run(op, InitialStateBuilder(d, lift, s).field(g), ro);
  EXPECT_TRUE(tr.final_state.all_finite());
  const GrowthFit fit = fit_growth(tr.times, tr.energy);
  EXPECT_LE(fit.fitted_rate, 1.5 * coefficient_bound(g, s, 0.0));
}

TEST(Growth, FitOfExponential) {
  std::vector<double> t, E;
  for (int i = 0; i <= 10; ++i) {
    t.push_back(0.1 * i);
    E.push_back(2.0 * std::exp(0.7 * t.back()));
  }
  GrowthFit f = fit_growth(t, E);
  EXPECT_NEAR(f.fitted_rate, 0.7, 1e-12);
  EXPECT_NEAR(f.max_rate, 0.7, 1e-12);
}
