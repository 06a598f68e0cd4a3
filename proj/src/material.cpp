#include "willis/material.hpp"

#include <sstream>

namespace willis {

namespace {

bool all_const(const Expr& e) { return e.is_constant(); }

template <std::size_t N>
std::array<Expr, N> diff_all(const std::array<Expr, N>& a, Var v) {
  std::array<Expr, N> r;
  for (std::size_t i = 0; i < N; ++i) r[i] = a[i].diff(v);
  return r;
}

template <std::size_t N>
std::array<Expr, N> diff_t(std::array<Expr, N> a, int order) {
  for (int o = 0; o < order; ++o) a = diff_all(a, Var::t);
  return a;
}

}  // namespace

MaterialSpec::MaterialSpec(Expr rho, std::array<Expr, 81> C, std::array<Expr, 27> S)
    : rho_(std::move(rho)), C_(std::move(C)), S_(std::move(S)) {
  auto scan = [&](const Expr& e) {
    if (!all_const(e)) uniform_ = false;
    if (e.depends_on(Var::t)) time_independent_ = false;
  };
  scan(rho_);
  for (auto& e : C_) scan(e);
  for (auto& e : S_) {
    scan(e);
    if (!e.is_zero()) coupling_zero_ = false;
  }
  fields_ = make_fields(rho_, C_, S_);
}

MaterialSpec::Fields MaterialSpec::make_fields(Expr rho, std::array<Expr, 81> C, std::array<Expr, 27> S) {
  static const Var axes[3] = {Var::x1, Var::x2, Var::x3};
  Fields f;
  f.rho = std::move(rho);
  f.rho_t = f.rho.diff(Var::t);
  f.C = std::move(C);
  f.C_t = diff_all(f.C, Var::t);
  f.S = std::move(S);
  f.S_t = diff_all(f.S, Var::t);
  for (int j = 0; j < 3; ++j) {
    f.rho_x[j] = f.rho.diff(axes[j]);
    f.C_x[j] = diff_all(f.C, axes[j]);
    f.S_x[j] = diff_all(f.S, axes[j]);
  }
  return f;
}

MaterialSpec MaterialSpec::from_voigt(Expr rho, const std::array<Expr, 21>& v, const std::array<Expr, 27>& S) {
  // upper triangle row-major
  Expr full[6][6];
  int n = 0;
  for (int I = 0; I < 6; ++I)
    for (int J = I; J < 6; ++J) {
      full[I][J] = v[n];
      full[J][I] = v[n];
      ++n;
    }
  std::array<Expr, 81> C;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) C[27 * i + 9 * j + 3 * k + l] = full[voigt_index(i, j)][voigt_index(k, l)];
  return MaterialSpec(std::move(rho), std::move(C), S);
}

MaterialSpec MaterialSpec::isotropic(Expr rho, Expr lambda, Expr mu, const std::array<Expr, 27>& S) {
  std::array<Expr, 21> v;
  Expr diag = lambda + 2.0 * mu;
  int n = 0;
  for (int I = 0; I < 6; ++I)
    for (int J = I; J < 6; ++J) {
      if (I < 3 && J < 3) v[n] = I == J ? diag : lambda;
      else if (I == J) v[n] = mu;
      else v[n] = Expr(0.0);
      ++n;
    }
  return from_voigt(std::move(rho), v, S);
}

MaterialSpec MaterialSpec::constant(double rho, const ElasticTensor& C, const CouplingTensor& S) {
  std::array<Expr, 21> v;
  Mat6 m = C.voigt();
  int n = 0;
  for (int I = 0; I < 6; ++I)
    for (int J = I; J < 6; ++J) v[n++] = Expr(m(I, J));
  return from_voigt(Expr(rho), v, coupling_constant(S));
}

std::array<Expr, 27> MaterialSpec::coupling_zero() { return {}; }

std::array<Expr, 27> MaterialSpec::coupling_totally_symmetric(const std::array<Expr, 10>& p) {
  std::array<Expr, 27> S;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) S[9 * i + 3 * j + k] = p[sym3_index(i, j, k)];
  return S;
}

std::array<Expr, 27> MaterialSpec::coupling_constant(const CouplingTensor& S) {
  std::array<Expr, 27> r;
  for (int n = 0; n < 27; ++n) r[n] = Expr(S.s[n]);
  return r;
}

MaterialSpec MaterialSpec::with_coupling(const std::array<Expr, 27>& S) const { return MaterialSpec(rho_, C_, S); }

MaterialSample MaterialSpec::sample_fields(const Fields& f, const Point4& p) {
  MaterialSample m;
  m.rho = f.rho.eval(p);
  m.drho_t = f.rho_t.eval(p);
  for (int j = 0; j < 3; ++j) m.drho[j] = f.rho_x[j].eval(p);
  for (int n = 0; n < 81; ++n) {
    if (f.C[n].is_constant()) {
      m.C.c[n] = f.C[n].constant_value();
      continue;
    }
    m.C.c[n] = f.C[n].eval(p);
    m.dC_t.c[n] = f.C_t[n].eval(p);
    for (int j = 0; j < 3; ++j) m.dC[j].c[n] = f.C_x[j][n].eval(p);
  }
  for (int n = 0; n < 27; ++n) {
    if (f.S[n].is_constant()) {
      m.S.s[n] = f.S[n].constant_value();
      continue;
    }
    m.S.s[n] = f.S[n].eval(p);
    m.dS_t.s[n] = f.S_t[n].eval(p);
    for (int j = 0; j < 3; ++j) m.dS[j].s[n] = f.S_x[j][n].eval(p);
  }
  return m;
}

MaterialSample MaterialSpec::sample(double x1, double x2, double x3, double t) const {
  Point4 p{x1, x2, x3, t};
  MaterialSample m = sample_fields(fields_, p);
  if (!(m.rho > 0.0)) {
    std::ostringstream os;
    os << "density must stay positive: rho = " << m.rho << " at (" << x1 << ", " << x2 << ", " << x3
       << ") t = " << t;
    throw DensityError(os.str());
  }
  return m;
}

MaterialSample MaterialSpec::sample_time_derivative(int order, double x1, double x2, double x3, double t) const {
  Point4 p{x1, x2, x3, t};
  if (order == 0) return sample_fields(fields_, p);
  Expr rho = rho_;
  for (int o = 0; o < order; ++o) rho = rho.diff(Var::t);
  return sample_fields(make_fields(rho, diff_t(C_, order), diff_t(S_, order)), p);
}

BoundaryLift::BoundaryLift() = default;

BoundaryLift::BoundaryLift(const std::array<Expr, 3>& u) : u_(u) {
  static const Var axes[3] = {Var::x1, Var::x2, Var::x3};
  for (int i = 0; i < 3; ++i) {
    const Expr& e = u_[i];
    if (!e.is_zero()) zero_ = false;
    if (e.depends_on(Var::t)) time_independent_ = false;
    ut_[i] = e.diff(Var::t);
    utt_[i] = ut_[i].diff(Var::t);
    for (int j = 0; j < 3; ++j) {
      dj_[j][i] = e.diff(axes[j]);
      djt_[j][i] = dj_[j][i].diff(Var::t);
      for (int k = 0; k < 3; ++k) djk_[i][j][k] = dj_[j][i].diff(axes[k]);
    }
  }
}

LiftSample BoundaryLift::sample(double x1, double x2, double x3, double t) const {
  LiftSample s;
  if (zero_) return s;
  Point4 p{x1, x2, x3, t};
  for (int i = 0; i < 3; ++i) {
    s.u(i) = u_[i].eval(p);
    s.ut(i) = ut_[i].eval(p);
    s.utt(i) = utt_[i].eval(p);
    for (int j = 0; j < 3; ++j) {
      s.grad(j, i) = dj_[j][i].eval(p);
      s.grad_t(j, i) = djt_[j][i].eval(p);
      for (int k = 0; k < 3; ++k) s.hess[i](j, k) = djk_[i][j][k].eval(p);
    }
  }
  return s;
}

LiftSample BoundaryLift::sample_time_derivative(int order, double x1, double x2, double x3, double t) const {
  if (order == 0 || zero_) return sample(x1, x2, x3, t);
  std::array<Expr, 3> u = u_;
  for (auto& e : u)
    for (int o = 0; o < order; ++o) e = e.diff(Var::t);
  return BoundaryLift(u).sample(x1, x2, x3, t);
}

bool InitialData::is_zero() const {
  for (int i = 0; i < 3; ++i)
    if (!u0[i].is_zero() || !mu0[i].is_zero()) return false;
  return true;
}

}  // namespace willis
