#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "willis/verify.hpp"

namespace willis {

DisplacementSolver::DisplacementSolver(const Grid& g, const MaterialSpec& spec, int order)
    : grid_(g), order_(order) {
  if (!g.periodic()) throw std::invalid_argument("displacement solver runs on periodic grids only");
  if (!spec.time_independent()) throw std::invalid_argument("displacement solver needs time-independent coefficients");
  if (order != 2 && order != 4) throw std::invalid_argument("scheme order must be 2 or 4");
  coef_ = second_order_coefficients(g, spec, BoundaryLift(), 0.0);
}

void DisplacementSolver::apply(const Field& y, Field& dydt) const {
  const Grid& g = grid_;
  const std::size_t n = g.size();
  Field u(g, 3), ut(g, 3), rhs(g, 3);
  for (int a = 0; a < 3; ++a) {
    std::copy(y.comp(a), y.comp(a) + n, u.comp(a));
    std::copy(y.comp(3 + a), y.comp(3 + a) + n, ut.comp(a));
  }
  second_order_rhs(g, coef_, order_, u, ut, rhs);
  for (int a = 0; a < 3; ++a) {
    std::copy(ut.comp(a), ut.comp(a) + n, dydt.comp(a));
    for (std::size_t p = 0; p < n; ++p) dydt.at(3 + a, p) = rhs.at(a, p) / coef_.rho[coef_.node(p)];
  }
}

void DisplacementSolver::step(Field& y, double dt) const {
  const Grid& g = grid_;
  Field k1(g, 6), k2(g, 6), k3(g, 6), k4(g, 6);
  apply(y, k1);
  Field s = y;
  s.axpy(0.5 * dt, k1);
  apply(s, k2);
  s = y;
  s.axpy(0.5 * dt, k2);
  apply(s, k3);
  s = y;
  s.axpy(dt, k3);
  apply(s, k4);
  y.axpy(dt / 6.0, k1);
  y.axpy(dt / 3.0, k2);
  y.axpy(dt / 3.0, k3);
  y.axpy(dt / 6.0, k4);
}

namespace {

Field part(const Field& v, int first) {
  Field f(v.size(), 3);
  for (int a = 0; a < 3; ++a) std::copy(v.comp(first + a), v.comp(first + a) + v.size(), f.comp(a));
  return f;
}

}  // namespace

Field displacement_part(const Field& v) { return part(v, 12); }
Field velocity_part(const Field& v) { return part(v, 9); }

double l2_norm(const Grid& g, const Field& f) {
  double s = 0.0;
  for (double x : f.raw()) s += x * x;
  return std::sqrt(s * g.cell_volume());
}

double l2_difference(const Grid& g, const Field& a, const Field& b) {
  double s = 0.0;
  for (std::size_t q = 0; q < a.raw().size(); ++q) {
    double d = a.raw()[q] - b.raw()[q];
    s += d * d;
  }
  return std::sqrt(s * g.cell_volume());
}

}  // namespace willis
