#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "willis/verify.hpp"

namespace willis {

namespace {

const Var kAxes[3] = {Var::x1, Var::x2, Var::x3};

// U, dU[j][a] = d_j U_a, ddU[k][j][a] = d_k d_j U_a
struct Jets {
  std::array<Expr, 3> U;
  std::array<std::array<Expr, 3>, 3> dU;
  std::array<std::array<std::array<Expr, 3>, 3>, 3> ddU;
  explicit Jets(const ManufacturedSolution& ms) : U(ms.U) {
    for (int j = 0; j < 3; ++j)
      for (int a = 0; a < 3; ++a) {
        dU[j][a] = U[a].diff(kAxes[j]);
        for (int k = 0; k < 3; ++k) ddU[k][j][a] = dU[j][a].diff(kAxes[k]);
      }
  }
};

}  // namespace

ManufacturedForcing manufactured_forcing(const Grid& g, const MaterialSpec& spec, const ManufacturedSolution& ms) {
  if (!spec.time_independent()) throw std::invalid_argument("manufactured forcing needs time-independent coefficients");
  const Jets J(ms);
  const double w = ms.omega;
  ManufacturedForcing f;
  const std::size_t n = g.size();
  f.Fc.assign(3 * n, 0.0);
  f.Fs.assign(3 * n, 0.0);
  for (int kk = 0; kk < g.nodes(2); ++kk)
    for (int jj = 0; jj < g.nodes(1); ++jj)
      for (int ii = 0; ii < g.nodes(0); ++ii) {
        const std::size_t p = g.index(ii, jj, kk);
        Vec3 x = g.point(ii, jj, kk);
        Point4 pt{x(0), x(1), x(2), 0.0};
        PointSystem ps = assemble_point(spec.sample(x(0), x(1), x(2), 0.0), LiftSample{});
        // v = cos(wt) vc + sin(wt) vs
        Vec15 vc = Vec15::Zero(), vs = Vec15::Zero();
        std::array<Vec15, 3> dvc, dvs;
        for (int k = 0; k < 3; ++k) {
          dvc[k].setZero();
          dvs[k].setZero();
        }
        for (int a = 0; a < 3; ++a) {
          double Ua = J.U[a].eval(pt);
          vc(12 + a) = Ua;
          vs(9 + a) = -w * Ua;
          for (int j = 0; j < 3; ++j) {
            double dja = J.dU[j][a].eval(pt);
            vc(3 * j + a) = dja;
            dvc[j](12 + a) = dja;
            dvs[j](9 + a) = -w * dja;
            for (int k = 0; k < 3; ++k) dvc[k](3 * j + a) = J.ddU[k][j][a].eval(pt);
          }
        }
        // d_t v = cos(wt) (w vs) + sin(wt) (-w vc)
        Vec15 Fc = ps.A0 * (w * vs) + ps.B * vc;
        Vec15 Fs = ps.A0 * (-w * vc) + ps.B * vs;
        for (int k = 0; k < 3; ++k) {
          Fc += ps.A[k] * dvc[k];
          Fs += ps.A[k] * dvs[k];
        }
        for (int a = 0; a < 3; ++a) {
          f.Fc[a * n + p] = Fc(9 + a);
          f.Fs[a * n + p] = Fs(9 + a);
        }
        for (int r : {0, 1, 2, 3, 4, 5, 6, 7, 8, 12, 13, 14})
          f.max_non_momentum = std::max({f.max_non_momentum, std::abs(Fc(r)), std::abs(Fs(r))});
      }
  return f;
}

Field manufactured_state(const Grid& g, const ManufacturedSolution& ms, double t) {
  const Jets J(ms);
  const double c = std::cos(ms.omega * t), s = std::sin(ms.omega * t);
  Field v(g, 15);
  for (int kk = 0; kk < g.nodes(2); ++kk)
    for (int jj = 0; jj < g.nodes(1); ++jj)
      for (int ii = 0; ii < g.nodes(0); ++ii) {
        const std::size_t p = g.index(ii, jj, kk);
        Vec3 x = g.point(ii, jj, kk);
        Point4 pt{x(0), x(1), x(2), 0.0};
        for (int a = 0; a < 3; ++a) {
          double Ua = J.U[a].eval(pt);
          v.at(12 + a, p) = c * Ua;
          v.at(9 + a, p) = -ms.omega * s * Ua;
          for (int j = 0; j < 3; ++j) v.at(3 * j + a, p) = c * J.dU[j][a].eval(pt);
        }
      }
  return v;
}

double ConvergenceReport::min_order() const {
  double m = INFINITY;
  for (double o : order_max) m = std::min(m, o);
  return order_max.empty() ? 0.0 : m;
}

ConvergenceReport convergence_study(const MaterialSpec& spec, const ManufacturedSolution& ms,
                                    const std::vector<int>& cells, const ConvergenceOptions& opt) {
  if (cells.size() < 3) throw std::invalid_argument("convergence study needs at least three grids");
  for (std::size_t q = 1; q < cells.size(); ++q)
    if (cells[q] <= cells[q - 1]) throw std::invalid_argument("convergence grids must be strictly refining");
  ConvergenceReport rep;
  rep.order = opt.scheme.order;
  const BoundaryLift lift;
  for (int n : cells) {
    Grid g = Grid::cube(opt.lower, opt.upper, n, opt.mode);
    WillisOperator op(g, spec, lift, opt.scheme);
    ManufacturedForcing F = manufactured_forcing(g, spec, ms);
    const std::size_t nn = g.size();
    const double omega = ms.omega;
    op.set_source([&F, nn, omega](double t, std::array<double*, 3> f) {
      const double c = std::cos(omega * t), s = std::sin(omega * t);
      for (int a = 0; a < 3; ++a)
        for (std::size_t p = 0; p < nn; ++p) f[a][p] += c * F.Fc[a * nn + p] + s * F.Fs[a * nn + p];
    });
    RunOptions ro;
    ro.T = opt.T;
    ro.keep_snapshots = false;
    ro.dt = opt.dt_factor * cfl_dt(g.h_min(), max_characteristic_speed(g, spec, 0.0), opt.scheme.cfl);
    Trajectory tr = run(op, manufactured_state(g, ms, 0.0), ro);
    Field exact = manufactured_state(g, ms, opt.T);
    ConvergenceLevel lv;
    lv.cells = n;
    lv.h = g.h_min();
    lv.dt = tr.dt;
    lv.forcing_consistency = F.max_non_momentum;
    for (int c = 0; c < 15; ++c)
      for (std::size_t p = 0; p < nn; ++p) {
        double e = std::abs(tr.final_state.at(c, p) - exact.at(c, p));
        double& slot = c < 9 ? lv.err_grad : (c < 12 ? lv.err_vel : lv.err_disp);
        slot = std::max(slot, e);
      }
    lv.err_max = std::max({lv.err_grad, lv.err_vel, lv.err_disp});
    rep.levels.push_back(lv);
  }
  auto order = [](double e1, double e2, double h1, double h2) { return std::log(e1 / e2) / std::log(h1 / h2); };
  for (std::size_t q = 1; q < rep.levels.size(); ++q) {
    const ConvergenceLevel &a = rep.levels[q - 1], &b = rep.levels[q];
    rep.order_grad.push_back(order(a.err_grad, b.err_grad, a.h, b.h));
    rep.order_vel.push_back(order(a.err_vel, b.err_vel, a.h, b.h));
    rep.order_disp.push_back(order(a.err_disp, b.err_disp, a.h, b.h));
    rep.order_max.push_back(order(a.err_max, b.err_max, a.h, b.h));
    if (!(b.err_max < a.err_max)) rep.monotone = false;
  }
  return rep;
}

}  // namespace willis
