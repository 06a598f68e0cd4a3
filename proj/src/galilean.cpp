#include <algorithm>
#include <cmath>

#include "willis/verify.hpp"

namespace willis {

namespace {

GridFields transformed_level(const Grid& g, const MaterialSpec& spec, const GridFields& f, const GalileanTransform* tr) {
  Field u = f.u, ut = f.ut, grad = f.grad;
  if (tr) {
    const double t = f.time;
    const Mat3 A = tr->A0 + t * tr->A1;
    const Vec3 b = tr->b0 + t * tr->b1;
    for (int k = 0; k < g.nodes(2); ++k)
      for (int j = 0; j < g.nodes(1); ++j)
        for (int i = 0; i < g.nodes(0); ++i) {
          const std::size_t p = g.index(i, j, k);
          Vec3 x = g.point(i, j, k);
          Vec3 du = A * x + b;
          Vec3 dut = tr->A1 * x + tr->b1;
          for (int a = 0; a < 3; ++a) {
            u.at(a, p) += du(a);
            ut.at(a, p) += dut(a);
            // d_j (A x)_a = A_aj
            for (int jj = 0; jj < 3; ++jj) grad.at(3 * jj + a, p) += A(a, jj);
          }
        }
  }
  return constitutive_fields(g, spec, std::move(u), std::move(ut), std::move(grad), f.time);
}

}  // namespace

GalileanReport galilean_check(const Grid& g, const MaterialSpec& spec, const BoundaryLift& lift,
                              const std::array<Field, 3>& states, double t, double dt, const GalileanTransform& tr,
                              const ResidualOptions& opt) {
  FieldWindow base, moved;
  for (int l = 0; l < 3; ++l) {
    GridFields f = physical_fields(g, spec, lift, states[l], t + (l - 1) * dt);
    base[l] = transformed_level(g, spec, f, nullptr);
    moved[l] = transformed_level(g, spec, f, &tr);
  }
  ResidualOptions o = opt;
  // x-linear fields do not wrap; keep the stencils off the periodic seam
  if (o.margin < 0) o.margin = opt.order;
  Field r0 = willis_residual_field(g, spec, base, o);
  Field r1 = willis_residual_field(g, spec, moved, o);
  GalileanReport rep;
  rep.original = residual_willis(g, spec, base, o);
  rep.transformed = residual_willis(g, spec, moved, o);
  for (int k = o.margin; k < g.nodes(2) - o.margin; ++k)
    for (int j = o.margin; j < g.nodes(1) - o.margin; ++j)
      for (int i = o.margin; i < g.nodes(0) - o.margin; ++i) {
        const std::size_t p = g.index(i, j, k);
        for (int c = 0; c < 15; ++c) rep.max_pointwise_defect = std::max(rep.max_pointwise_defect, std::abs(r1.at(c, p) - r0.at(c, p)));
      }
  for (std::size_t e = 0; e < rep.original.max.size(); ++e)
    rep.norm_difference = std::max(rep.norm_difference, std::abs(rep.transformed.max[e] - rep.original.max[e]));
  return rep;
}

}  // namespace willis
