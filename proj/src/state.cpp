#include "willis/state.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

namespace willis {

StateVector pack_state(const StateParts& s) {
  StateVector v;
  for (int j = 0; j < 3; ++j)
    for (int a = 0; a < 3; ++a) v(3 * j + a) = s.grad(j, a);
  v.segment<3>(9) = s.ut;
  v.segment<3>(12) = s.u;
  return v;
}

StateParts unpack_state(const StateVector& v) {
  StateParts s;
  for (int j = 0; j < 3; ++j)
    for (int a = 0; a < 3; ++a) s.grad(j, a) = v(3 * j + a);
  s.ut = v.segment<3>(9);
  s.u = v.segment<3>(12);
  return s;
}

InitialStateBuilder::InitialStateBuilder(const InitialData& data, const BoundaryLift& lift, const MaterialSpec& spec)
    : data_(data), lift_(lift), spec_(spec) {
  static const Var axes[3] = {Var::x1, Var::x2, Var::x3};
  for (int j = 0; j < 3; ++j)
    for (int a = 0; a < 3; ++a) grad_[j][a] = data_.u0[a].diff(axes[j]);
}

Vec3 InitialStateBuilder::u0(const Vec3& x) const {
  Point4 p{x(0), x(1), x(2), 0.0};
  return {data_.u0[0].eval(p), data_.u0[1].eval(p), data_.u0[2].eval(p)};
}

Mat3 InitialStateBuilder::grad_u0(const Vec3& x) const {
  Point4 p{x(0), x(1), x(2), 0.0};
  Mat3 g;
  for (int j = 0; j < 3; ++j)
    for (int a = 0; a < 3; ++a) g(j, a) = grad_[j][a].eval(p);
  return g;
}

Vec3 InitialStateBuilder::mu0(const Vec3& x) const {
  Point4 p{x(0), x(1), x(2), 0.0};
  return {data_.mu0[0].eval(p), data_.mu0[1].eval(p), data_.mu0[2].eval(p)};
}

StateVector InitialStateBuilder::at(const Vec3& x, InitialStateReport* report) const {
  MaterialSample m = spec_.sample(x(0), x(1), x(2), 0.0);
  LiftSample ub = lift_.sample(x(0), x(1), x(2), 0.0);
  Mat3 G = grad_u0(x);
  Vec3 mu = mu0(x);
  StateParts s;
  s.grad = G - ub.grad;
  s.u = u0(x) - ub.u;
  for (int i = 0; i < 3; ++i) {
    double a = 0.0, b = 0.0;
    for (int k = 0; k < 3; ++k)
      for (int l = 0; l < 3; ++l) {
        a += m.S(i, k, l) * G(k, l);
        b += m.S(k, l, i) * G(k, l);
      }
    s.ut(i) = (mu(i) - a) / m.rho - ub.ut(i);
    if (report) report->index_pattern_discrepancy = std::max(report->index_pattern_discrepancy, std::abs(a - b));
  }
  return pack_state(s);
}

Field InitialStateBuilder::field(const Grid& g, InitialStateReport* report) const {
  Field f(g, 15);
  InitialStateReport local;
  for (int k = 0; k < g.nodes(2); ++k)
    for (int j = 0; j < g.nodes(1); ++j)
      for (int i = 0; i < g.nodes(0); ++i) {
        Vec3 x = g.point(i, j, k);
        StateVector v = at(x, &local);
        f.set_state(g.index(i, j, k), v);
        local.field_scale = std::max(local.field_scale, v.cwiseAbs().maxCoeff());
        if (g.on_boundary(i, j, k))
          local.boundary_trace_mismatch = std::max(local.boundary_trace_mismatch, v.segment<3>(12).cwiseAbs().maxCoeff());
      }
  local.trace_compatible = local.boundary_trace_mismatch <= 1e-10 * std::max(local.field_scale, 1.0);
  if (!local.trace_compatible)
    std::cerr << "warning: initial displacement does not match the boundary lift on the boundary (max mismatch "
              << local.boundary_trace_mismatch << ")\n";
  if (report) *report = local;
  return f;
}

PhysicalFields recover_fields(const StateVector& v, const LiftSample& ub, const MaterialSample& m) {
  StateParts s = unpack_state(v);
  PhysicalFields f;
  f.u = s.u + ub.u;
  f.ut = s.ut + ub.ut;
  f.grad = s.grad + ub.grad;
  f.eps = strain(f.grad);
  f.mu = m.rho * f.ut + contract_first_pair(m.S, f.eps);
  HTensor H = assemble_H(m.C, m.S, m.rho);
  f.sigma = contract(H, f.eps) + contract(m.S, f.mu) / m.rho;
  return f;
}

Mat3 stress_direct(const PhysicalFields& f, const MaterialSample& m) {
  return contract(m.C, f.eps) + contract(m.S, f.ut);
}

std::array<Expr, 3> boundary_source_rho_e_expr(const MaterialSpec& spec, const BoundaryLift& lift) {
  static const Var axes[3] = {Var::x1, Var::x2, Var::x3};
  const auto& ub = lift.u();
  std::array<Expr, 3> re;
  for (int i = 0; i < 3; ++i) {
    Expr v = spec.rho().diff(Var::t) * ub[i].diff(Var::t) + spec.rho() * ub[i].diff(Var::t).diff(Var::t);
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        v = v - spec.S(i, j, k).diff(axes[j]) * ub[k].diff(Var::t);
        v = v + (spec.S(j, k, i) - spec.S(i, j, k)) * ub[k].diff(axes[j]).diff(Var::t);
        for (int l = 0; l < 3; ++l) {
          v = v - spec.C(i, j, k, l) * ub[l].diff(axes[j]).diff(axes[k]);
          v = v + (spec.S(k, l, i).diff(Var::t) * (j == 0 ? 1.0 : 0.0) - spec.C(i, j, k, l).diff(axes[j])) *
                      ub[l].diff(axes[k]);
        }
      }
    re[i] = v;
  }
  return re;
}

namespace {

// d_t^i of A0 (identity blocks only contribute at i = 0)
Mat15 A0_derivative(const MaterialSample& m, int i) {
  if (i == 0) return assemble_A0(m.C, m.rho);
  Mat15 A = Mat15::Zero();
  A.topLeftCorner<9, 9>() = elastic_blocks(m.C).assembled();
  for (int a = 0; a < 3; ++a) A(9 + a, 9 + a) = m.rho;
  return A;
}

Mat15 Ak_derivative(const MaterialSample& m, int k, int i) {
  Mat15 A = assemble_Ak(m.C, k);
  if (i > 0) A.bottomRightCorner<3, 3>().setZero();
  return A;
}

Mat15 B_derivative(const MaterialSample& m, int i) {
  Mat15 B = assemble_B(m);
  if (i > 0) B.bottomRows<3>().setZero();
  return B;
}

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// d_t^i (A0^{-1} Y) for i = 0..n from d_t^m A0 and d_t^m Y via Leibniz.
std::vector<Mat15> inverse_product_derivatives(const std::vector<Mat15>& A0d, const std::vector<Mat15>& Yd,
                                               const Eigen::LDLT<Mat15>& A0inv) {
  std::vector<Mat15> X(Yd.size());
  for (std::size_t i = 0; i < Yd.size(); ++i) {
    Mat15 r = Yd[i];
    for (std::size_t m = 1; m <= i; ++m) r -= binom(static_cast<int>(i), static_cast<int>(m)) * A0d[m] * X[i - m];
    X[i] = A0inv.solve(r);
  }
  return X;
}

}  // namespace

CompatibilitySequence compatibility_sequence(const Grid& g, int order, const MaterialSpec& spec,
                                             const BoundaryLift& lift, const Field& v0, int s) {
  if (s < 1) throw std::invalid_argument("compatibility order s must be >= 1");
  CompatibilitySequence out;
  out.v0p.push_back(v0);
  std::array<AxisStencil, 3> st;
  for (int a = 0; a < 3; ++a) st[a] = first_derivative_stencil(g, a, order);

  // d_t^q e for q = 0..s-2, symbolically
  std::array<Expr, 3> re = boundary_source_rho_e_expr(spec, lift);
  std::array<Expr, 3> e;
  for (int i = 0; i < 3; ++i) e[i] = re[i] / spec.rho();

  for (int p = 1; p < s; ++p) {
    // derivatives of all previous jets, computed once per p
    std::vector<std::array<Field, 3>> dprev(p);
    for (int q = 0; q < p; ++q)
      for (int a = 0; a < 3; ++a) {
        dprev[q][a] = Field(g, 15);
        for (int c = 0; c < 15; ++c) apply_stencil(g, st[a], a, out.v0p[q].comp(c), dprev[q][a].comp(c));
      }
    std::array<Expr, 3> ed = e;
    for (auto& x : ed)
      for (int q = 0; q < p - 1; ++q) x = x.diff(Var::t);

    Field next(g, 15);
    for (int kk = 0; kk < g.nodes(2); ++kk)
      for (int jj = 0; jj < g.nodes(1); ++jj)
        for (int ii = 0; ii < g.nodes(0); ++ii) {
          const std::size_t idx = g.index(ii, jj, kk);
          Vec3 x = g.point(ii, jj, kk);
          std::vector<Mat15> A0d(p), Bd(p);
          std::array<std::vector<Mat15>, 3> Akd;
          for (int i = 0; i < p; ++i) {
            MaterialSample m = i == 0 ? spec.sample(x(0), x(1), x(2), 0.0)
                                      : spec.sample_time_derivative(i, x(0), x(1), x(2), 0.0);
            A0d[i] = A0_derivative(m, i);
            Bd[i] = B_derivative(m, i);
            for (int k = 0; k < 3; ++k) Akd[k].push_back(Ak_derivative(m, k, i));
          }
          Eigen::LDLT<Mat15> A0inv(A0d[0]);
          auto XB = inverse_product_derivatives(A0d, Bd, A0inv);
          std::array<std::vector<Mat15>, 3> XA;
          for (int k = 0; k < 3; ++k) XA[k] = inverse_product_derivatives(A0d, Akd[k], A0inv);

          Vec15 acc = Vec15::Zero();
          for (int i = 0; i <= p - 1; ++i) {
            const int q = p - 1 - i;
            Vec15 vq = out.v0p[q].state(idx);
            Vec15 gi = -XB[i] * vq;
            for (int k = 0; k < 3; ++k) gi -= XA[k][i] * dprev[q][k].state(idx);
            acc += binom(p - 1, i) * gi;
          }
          Point4 pt{x(0), x(1), x(2), 0.0};
          for (int a = 0; a < 3; ++a) acc(9 + a) -= ed[a].eval(pt);
          next.set_state(idx, acc);
        }
    out.v0p.push_back(std::move(next));
  }
  for (const Field& f : out.v0p) out.residuals.push_back(boundary_residual(g, spec, f, 0.0));
  return out;
}

double boundary_residual(const Grid& g, const MaterialSpec& spec, const Field& v, double t) {
  if (g.periodic()) return 0.0;
  double r = 0.0;
  for (int k = 0; k < g.nodes(2); ++k)
    for (int j = 0; j < g.nodes(1); ++j)
      for (int i = 0; i < g.nodes(0); ++i) {
        if (!g.on_boundary(i, j, k)) continue;
        const int pos[3] = {i, j, k};
        Vec3 x = g.point(i, j, k);
        MaterialSample m = spec.sample(x(0), x(1), x(2), t);
        Vec15 z = v.state(g.index(i, j, k));
        for (int a = 0; a < 3; ++a) {
          for (int side = 0; side < 2; ++side) {
            if (pos[a] != (side == 0 ? 0 : g.nodes(a) - 1)) continue;
            Vec3 nu = Vec3::Zero();
            nu(a) = side == 0 ? -1.0 : 1.0;
            Mat15 M = assemble_M(assemble_C_nu(m.C, nu));
            r = std::max(r, (M * z).cwiseAbs().maxCoeff());
          }
        }
      }
  return r;
}

}  // namespace willis
