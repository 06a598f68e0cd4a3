#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "willis/verify.hpp"

namespace willis {

namespace {

std::array<Expr, 3> momentum_expr(const MaterialSpec& spec, const std::array<Expr, 3>& u0,
                                  const std::array<Expr, 3>& ut0) {
  static const Var axes[3] = {Var::x1, Var::x2, Var::x3};
  std::array<Expr, 3> mu;
  for (int i = 0; i < 3; ++i) {
    Expr m = spec.rho() * ut0[i];
    for (int k = 0; k < 3; ++k)
      for (int l = 0; l < 3; ++l) {
        if (spec.S(k, l, i).is_zero()) continue;
        m = m + spec.S(k, l, i) * (0.5 * (u0[l].diff(axes[k]) + u0[k].diff(axes[l])));
      }
    mu[i] = m;
  }
  return mu;
}

}  // namespace

ReductionReport reduction_check(const Grid& g, const MaterialSpec& spec, const std::array<Expr, 3>& u0,
                                const std::array<Expr, 3>& ut0, const ReductionOptions& opt) {
  if (!g.periodic()) throw std::invalid_argument("reduction check runs on a periodic grid with compact data");
  if (opt.require_constant && !spec.uniform())
    throw std::invalid_argument("reduction check needs rho, C and S constant in space and time");

  ReductionReport rep;
  rep.h = g.h_min();
  for (int k = 0; k < g.nodes(2); k += spec.uniform() ? g.nodes(2) : 2)
    for (int j = 0; j < g.nodes(1); j += spec.uniform() ? g.nodes(1) : 2)
      for (int i = 0; i < g.nodes(0); i += spec.uniform() ? g.nodes(0) : 2) {
        Vec3 x = g.point(i, j, k);
        rep.max_cyclic_asymmetry = std::max(rep.max_cyclic_asymmetry,
                                            validate_coupling(spec.sample(x(0), x(1), x(2), 0.0).S).cc2_violation);
      }
  rep.propagation_speed = max_characteristic_speed(g, spec, 0.0, true);

  const BoundaryLift lift;
  const MaterialSpec spec0 = spec.with_coupling(MaterialSpec::coupling_zero());

  // first-order run with S
  InitialData data{u0, momentum_expr(spec, u0, ut0)};
  WillisOperator op(g, spec, lift, opt.scheme);
  Field v0 = InitialStateBuilder(data, lift, spec).field(g);
  std::vector<Field> coupled;
  RunOptions ro;
  ro.T = opt.T;
  ro.snapshot_every = opt.compare_every;
  ro.keep_snapshots = false;
  ro.on_snapshot = [&](double t, const Field& v) {
    rep.times.push_back(t);
    coupled.push_back(displacement_part(v));
  };
  rep.willis = run(op, v0, ro);
  rep.dt = rep.willis.dt;
  rep.steps = rep.willis.steps;

  // first-order run with S = 0 from the same displacement and velocity
  if (opt.run_uncoupled) {
    InitialData data0{u0, momentum_expr(spec0, u0, ut0)};
    WillisOperator op0(g, spec0, lift, opt.scheme);
    Field w0 = InitialStateBuilder(data0, lift, spec0).field(g);
    RunOptions r0 = ro;
    r0.dt = rep.dt;
    std::size_t idx = 0;
    r0.on_snapshot = [&](double, const Field& v) {
      rep.willis_vs_uncoupled.push_back(l2_difference(g, coupled[idx++], displacement_part(v)));
    };
    run(op0, w0, r0);
  }

  // classical displacement form
  DisplacementSolver classical(g, spec0, opt.scheme.order);
  Field y(g, 6);
  for (int k = 0; k < g.nodes(2); ++k)
    for (int j = 0; j < g.nodes(1); ++j)
      for (int i = 0; i < g.nodes(0); ++i) {
        Vec3 x = g.point(i, j, k);
        Point4 pt{x(0), x(1), x(2), 0.0};
        const std::size_t p = g.index(i, j, k);
        for (int a = 0; a < 3; ++a) {
          y.at(a, p) = u0[a].eval(pt);
          y.at(3 + a, p) = ut0[a].eval(pt);
        }
      }
  std::size_t idx = 0;
  auto compare = [&]() {
    Field u(g, 3);
    for (int a = 0; a < 3; ++a) std::copy(y.comp(a), y.comp(a) + g.size(), u.comp(a));
    rep.willis_vs_classical.push_back(l2_difference(g, coupled[idx++], u));
  };
  compare();
  for (int n = 0; n < rep.steps; ++n) {
    classical.step(y, rep.dt);
    bool last = n + 1 == rep.steps;
    if (last || (opt.compare_every > 0 && (n + 1) % opt.compare_every == 0)) compare();
  }
  return rep;
}

PropagationCheck check_propagation(const Trajectory& tr, double speed, double h) {
  PropagationCheck c;
  c.speed = speed;
  c.tolerance = 2.0 * h;
  c.step_rate_bound = tr.dt > 0.0 ? speed + 2.0 * h / tr.dt : speed;
  if (tr.radius.empty()) return c;
  const double r0 = tr.radius.front();
  c.max_excess = -INFINITY;
  for (std::size_t n = 0; n < tr.radius.size(); ++n) {
    c.max_excess = std::max(c.max_excess, tr.radius[n] - r0 - speed * tr.times[n]);
    if (n > 0 && tr.dt > 0.0) c.max_step_rate = std::max(c.max_step_rate, (tr.radius[n] - tr.radius[n - 1]) / tr.dt);
  }
  c.pass = c.max_step_rate <= c.step_rate_bound;
  c.within_cone = c.max_excess <= c.tolerance;
  return c;
}

}  // namespace willis
