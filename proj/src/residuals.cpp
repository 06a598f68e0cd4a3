#include <algorithm>
#include <cmath>

#include "willis/verify.hpp"

namespace willis {

namespace {

int resolve_margin(const Grid& g, const ResidualOptions& opt) {
  if (opt.margin >= 0) return opt.margin;
  return g.periodic() ? 0 : opt.order;
}

bool in_window(const Grid& g, int i, int j, int k, int m) {
  const int pos[3] = {i, j, k};
  for (int a = 0; a < 3; ++a)
    if (pos[a] < m || pos[a] >= g.nodes(a) - m) return false;
  return true;
}

// derivative of every component of f along each axis
std::array<Field, 3> gradient_of(const Grid& g, int order, const Field& f) {
  std::array<Field, 3> d;
  for (int a = 0; a < 3; ++a) {
    AxisStencil st = first_derivative_stencil(g, a, order);
    d[a] = Field(g, f.components());
    for (int c = 0; c < f.components(); ++c) apply_stencil(g, st, a, f.comp(c), d[a].comp(c));
  }
  return d;
}

// compact central second difference; zero where it does not fit
void second_difference(const Grid& g, int axis, int order, const double* f, double* out) {
  static const double c2[3] = {1.0, -2.0, 1.0};
  static const double c4[5] = {-1.0 / 12.0, 16.0 / 12.0, -30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0};
  const int half = order / 2;
  const double* c = order == 2 ? c2 : c4;
  const double ih2 = 1.0 / (g.h(axis) * g.h(axis));
  const int n = g.nodes(axis);
  const std::ptrdiff_t s = g.stride(axis);
#pragma omp parallel for collapse(2) schedule(static)
  for (int k = 0; k < g.nodes(2); ++k)
    for (int j = 0; j < g.nodes(1); ++j)
      for (int i = 0; i < g.nodes(0); ++i) {
        const int pos[3] = {i, j, k};
        const int q = pos[axis];
        const std::size_t p = g.index(i, j, k);
        if (!g.periodic() && (q < half || q >= n - half)) {
          out[p] = 0.0;
          continue;
        }
        double acc = 0.0;
        for (int m = -half; m <= half; ++m) {
          int r = q + m;
          if (r < 0) r += n;
          else if (r >= n) r -= n;
          acc += c[m + half] * f[p + (r - q) * s];
        }
        out[p] = acc * ih2;
      }
}

Field combine_levels(const Field& a, const Field& b, double ca, double cb) {
  Field r = a;
  for (std::size_t q = 0; q < r.raw().size(); ++q) r.raw()[q] = ca * a.raw()[q] + cb * b.raw()[q];
  return r;
}

ResidualReport summarize(const Grid& g, const Field& r, const std::vector<std::pair<std::string, std::pair<int, int>>>& eq,
                         int margin, double t) {
  ResidualReport rep;
  rep.h = g.h_min();
  rep.time = t;
  const double dv = g.cell_volume();
  for (const auto& [name, range] : eq) {
    double mx = 0.0, s2 = 0.0;
    for (int k = 0; k < g.nodes(2); ++k)
      for (int j = 0; j < g.nodes(1); ++j)
        for (int i = 0; i < g.nodes(0); ++i) {
          if (!in_window(g, i, j, k, margin)) continue;
          const std::size_t p = g.index(i, j, k);
          for (int c = range.first; c < range.second; ++c) {
            double x = r.at(c, p);
            mx = std::max(mx, std::abs(x));
            s2 += x * x;
          }
        }
    rep.equations.push_back(name);
    rep.max.push_back(mx);
    rep.l2.push_back(std::sqrt(s2 * dv));
  }
  return rep;
}

}  // namespace

double ResidualReport::max_all() const {
  double m = 0.0;
  for (double x : max) m = std::max(m, x);
  return m;
}

GridFields physical_fields(const Grid& g, const MaterialSpec& spec, const BoundaryLift& lift, const Field& v,
                           double t) {
  GridFields f;
  f.time = t;
  f.u = Field(g, 3);
  f.ut = Field(g, 3);
  f.grad = Field(g, 9);
  f.sigma = Field(g, 9);
  f.mu = Field(g, 3);
  for (int k = 0; k < g.nodes(2); ++k)
    for (int j = 0; j < g.nodes(1); ++j)
      for (int i = 0; i < g.nodes(0); ++i) {
        const std::size_t p = g.index(i, j, k);
        Vec3 x = g.point(i, j, k);
        PhysicalFields pf = recover_fields(v.state(p), lift.sample(x(0), x(1), x(2), t), spec.sample(x(0), x(1), x(2), t));
        for (int a = 0; a < 3; ++a) {
          f.u.at(a, p) = pf.u(a);
          f.ut.at(a, p) = pf.ut(a);
          f.mu.at(a, p) = pf.mu(a);
          for (int b = 0; b < 3; ++b) {
            f.grad.at(3 * a + b, p) = pf.grad(a, b);
            f.sigma.at(3 * a + b, p) = pf.sigma(a, b);
          }
        }
      }
  return f;
}

GridFields constitutive_fields(const Grid& g, const MaterialSpec& spec, Field u, Field ut, Field grad, double t) {
  GridFields f;
  f.time = t;
  f.u = std::move(u);
  f.ut = std::move(ut);
  f.grad = std::move(grad);
  f.sigma = Field(g, 9);
  f.mu = Field(g, 3);
  for (int k = 0; k < g.nodes(2); ++k)
    for (int j = 0; j < g.nodes(1); ++j)
      for (int i = 0; i < g.nodes(0); ++i) {
        const std::size_t p = g.index(i, j, k);
        Vec3 x = g.point(i, j, k);
        MaterialSample m = spec.sample(x(0), x(1), x(2), t);
        Mat3 G;
        Vec3 vt;
        for (int a = 0; a < 3; ++a) {
          vt(a) = f.ut.at(a, p);
          for (int b = 0; b < 3; ++b) G(a, b) = f.grad.at(3 * a + b, p);
        }
        Mat3 eps = strain(G);
        Mat3 sigma = contract(m.C, eps) + contract(m.S, vt);
        Vec3 mu = m.rho * vt + contract_first_pair(m.S, eps);
        for (int a = 0; a < 3; ++a) {
          f.mu.at(a, p) = mu(a);
          for (int b = 0; b < 3; ++b) f.sigma.at(3 * a + b, p) = sigma(a, b);
        }
      }
  return f;
}

Field willis_residual_field(const Grid& g, const MaterialSpec& spec, const FieldWindow& w, const ResidualOptions& opt) {
  const double dt = 0.5 * (w[2].time - w[0].time);
  const double t = w[1].time;
  Field mut = combine_levels(w[2].mu, w[0].mu, 0.5 / dt, -0.5 / dt);
  Field ut = combine_levels(w[2].u, w[0].u, 0.5 / dt, -0.5 / dt);
  std::array<Field, 3> dsig = gradient_of(g, opt.order, w[1].sigma);
  std::array<Field, 3> du = gradient_of(g, opt.order, w[1].u);
  Field r(g, 15);
  for (int k = 0; k < g.nodes(2); ++k)
    for (int j = 0; j < g.nodes(1); ++j)
      for (int i = 0; i < g.nodes(0); ++i) {
        const std::size_t p = g.index(i, j, k);
        Vec3 x = g.point(i, j, k);
        MaterialSample m = spec.sample(x(0), x(1), x(2), t);
        Mat3 G;
        Vec3 vt;
        for (int a = 0; a < 3; ++a) {
          vt(a) = ut.at(a, p);
          for (int b = 0; b < 3; ++b) G(a, b) = du[a].at(b, p);
        }
        Mat3 eps = strain(G);
        Mat3 sig = contract(m.C, eps) + contract(m.S, vt);
        Vec3 mu = m.rho * vt + contract_first_pair(m.S, eps);
        for (int a = 0; a < 3; ++a) {
          double div = 0.0;
          for (int b = 0; b < 3; ++b) div += dsig[b].at(3 * a + b, p);
          r.at(a, p) = mut.at(a, p) - div;
          for (int b = 0; b < 3; ++b) r.at(3 + 3 * a + b, p) = w[1].sigma.at(3 * a + b, p) - sig(a, b);
          r.at(12 + a, p) = w[1].mu.at(a, p) - mu(a);
        }
      }
  return r;
}

ResidualReport residual_willis(const Grid& g, const MaterialSpec& spec, const FieldWindow& w,
                               const ResidualOptions& opt) {
  Field r = willis_residual_field(g, spec, w, opt);
  return summarize(g, r, {{"momentum balance", {0, 3}}, {"stress law", {3, 12}}, {"momentum law", {12, 15}}},
                   resolve_margin(g, opt), w[1].time);
}

SecondOrderCoefficients second_order_coefficients(const Grid& g, const MaterialSpec& spec, const BoundaryLift& lift,
                                                  double t) {
  SecondOrderCoefficients c;
  c.time = t;
  c.uniform = spec.uniform() && lift.is_zero();
  const std::size_t n = c.uniform ? 1 : g.size();
  c.rho.assign(n, 0.0);
  c.C.assign(81 * n, 0.0);
  c.K.assign(27 * n, 0.0);
  c.V.assign(9 * n, 0.0);
  c.Q.assign(27 * n, 0.0);
  c.rho_e.assign(3 * n, 0.0);
  std::array<Expr, 3> re;
  if (!lift.is_zero()) re = boundary_source_rho_e_expr(spec, lift);
  auto fill = [&](std::size_t s, const Vec3& x) {
    MaterialSample m = spec.sample(x(0), x(1), x(2), t);
    c.rho[s] = m.rho;
    for (int q = 0; q < 81; ++q) c.C[81 * s + q] = m.C.c[q];
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k) {
        double v = i == k ? -m.drho_t : 0.0;
        for (int j = 0; j < 3; ++j) {
          v += m.dS[j](i, j, k);
          c.Q[27 * s + 9 * i + 3 * j + k] = m.S(i, j, k) - m.S(j, k, i);
        }
        c.V[9 * s + 3 * i + k] = v;
        for (int l = 0; l < 3; ++l) {
          double kk = -m.dS_t(k, l, i);
          for (int j = 0; j < 3; ++j) kk += m.dC[j](i, j, k, l);
          c.K[27 * s + 9 * i + 3 * k + l] = kk;
        }
      }
    if (!lift.is_zero()) {
      Point4 pt{x(0), x(1), x(2), t};
      for (int i = 0; i < 3; ++i) c.rho_e[3 * s + i] = re[i].eval(pt);
    }
  };
  if (c.uniform) {
    fill(0, g.point(0, 0, 0));
  } else {
    for (int k = 0; k < g.nodes(2); ++k)
      for (int j = 0; j < g.nodes(1); ++j)
        for (int i = 0; i < g.nodes(0); ++i) fill(g.index(i, j, k), g.point(i, j, k));
  }
  for (double q : c.Q) c.max_abs_Q = std::max(c.max_abs_Q, std::abs(q));
  return c;
}

void second_order_rhs(const Grid& g, const SecondOrderCoefficients& c, int order, const Field& u, const Field& ut,
                      Field& out) {
  std::array<Field, 3> du = gradient_of(g, order, u);
  std::array<Field, 3> dut;
  if (c.max_abs_Q > 0.0) dut = gradient_of(g, order, ut);
  // second derivatives, pair (j, k) with j <= k
  std::array<std::array<Field, 3>, 3> dd;
  for (int j = 0; j < 3; ++j) {
    dd[j][j] = Field(g, 3);
    for (int l = 0; l < 3; ++l) second_difference(g, j, order, u.comp(l), dd[j][j].comp(l));
    for (int k = j + 1; k < 3; ++k) {
      AxisStencil st = first_derivative_stencil(g, j, order);
      dd[j][k] = Field(g, 3);
      for (int l = 0; l < 3; ++l) apply_stencil(g, st, j, du[k].comp(l), dd[j][k].comp(l));
    }
  }
  const int n0 = g.nodes(0), n1 = g.nodes(1), n2 = g.nodes(2);
#pragma omp parallel for collapse(2) schedule(static)
  for (int kk = 0; kk < n2; ++kk)
    for (int jj = 0; jj < n1; ++jj)
      for (int ii = 0; ii < n0; ++ii) {
        const std::size_t p = g.index(ii, jj, kk);
        const std::size_t s = c.node(p);
        const double* C = &c.C[81 * s];
        for (int i = 0; i < 3; ++i) {
          double acc = -c.rho_e[3 * s + i];
          for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) {
              const Field& f = j <= k ? dd[j][k] : dd[k][j];
              for (int l = 0; l < 3; ++l) acc += C[27 * i + 9 * j + 3 * k + l] * f.at(l, p);
            }
          for (int k = 0; k < 3; ++k) {
            acc += c.V[9 * s + 3 * i + k] * ut.at(k, p);
            for (int l = 0; l < 3; ++l) acc += c.K[27 * s + 9 * i + 3 * k + l] * du[k].at(l, p);
          }
          if (c.max_abs_Q > 0.0)
            for (int j = 0; j < 3; ++j)
              for (int k = 0; k < 3; ++k) acc += c.Q[27 * s + 9 * i + 3 * j + k] * dut[j].at(k, p);
          out.at(i, p) = acc;
        }
      }
}

ResidualReport residual_second_order(const Grid& g, const MaterialSpec& spec, const BoundaryLift& lift,
                                     const std::array<Field, 3>& u, double t, double dt,
                                     const ResidualOptions& opt) {
  SecondOrderCoefficients c = second_order_coefficients(g, spec, lift, t);
  Field ut = combine_levels(u[2], u[0], 0.5 / dt, -0.5 / dt);
  Field rhs(g, 3);
  second_order_rhs(g, c, opt.order, u[1], ut, rhs);
  Field r(g, 6);
  const double idt2 = 1.0 / (dt * dt);
  for (std::size_t p = 0; p < g.size(); ++p)
    for (int i = 0; i < 3; ++i) {
      double utt = (u[2].at(i, p) - 2.0 * u[1].at(i, p) + u[0].at(i, p)) * idt2;
      r.at(i, p) = c.rho[c.node(p)] * utt - rhs.at(i, p);
    }
  // the asymmetric-coupling term on its own
  if (c.max_abs_Q > 0.0) {
    SecondOrderCoefficients q = c;
    std::fill(q.C.begin(), q.C.end(), 0.0);
    std::fill(q.K.begin(), q.K.end(), 0.0);
    std::fill(q.V.begin(), q.V.end(), 0.0);
    std::fill(q.rho_e.begin(), q.rho_e.end(), 0.0);
    Field qt(g, 3);
    second_order_rhs(g, q, opt.order, u[1], ut, qt);
    for (std::size_t p = 0; p < g.size(); ++p)
      for (int i = 0; i < 3; ++i) r.at(3 + i, p) = qt.at(i, p);
  }
  return summarize(g, r, {{"second-order form", {0, 3}}, {"asymmetric coupling term", {3, 6}}},
                   resolve_margin(g, opt), t);
}

double hooke_recovery_error(const Grid& g, const MaterialSpec& spec, const BoundaryLift& lift, const Field& v,
                            double t) {
  double worst = 0.0, scale = 0.0;
  for (int k = 0; k < g.nodes(2); ++k)
    for (int j = 0; j < g.nodes(1); ++j)
      for (int i = 0; i < g.nodes(0); ++i) {
        const std::size_t p = g.index(i, j, k);
        Vec3 x = g.point(i, j, k);
        MaterialSample m = spec.sample(x(0), x(1), x(2), t);
        PhysicalFields f = recover_fields(v.state(p), lift.sample(x(0), x(1), x(2), t), m);
        Mat3 hooke = contract(m.C, f.eps);
        worst = std::max(worst, (f.sigma - hooke).cwiseAbs().maxCoeff());
        scale = std::max(scale, hooke.cwiseAbs().maxCoeff());
      }
  return scale > 0.0 ? worst / scale : worst;
}

}  // namespace willis
