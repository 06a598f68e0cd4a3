#pragma once

#include <array>
#include <vector>

#include "willis/assembly.hpp"
#include "willis/grid.hpp"
#include "willis/material.hpp"

namespace willis {

using StateVector = Vec15;

struct StateParts {
  Vec3 u = Vec3::Zero();     // u~
  Mat3 grad = Mat3::Zero();  // grad(j, a) = d_j u~_a
  Vec3 ut = Vec3::Zero();    // d_t u~
};

StateVector pack_state(const StateParts& s);
StateParts unpack_state(const StateVector& v);

struct InitialStateReport {
  // max over samples of |S_ikl d_k u0_l - S_kli d_k u0_l| (zero under total symmetry)
  double index_pattern_discrepancy = 0.0;
  // max |u0 - ubar(., 0)| over boundary nodes (bounded mode only)
  double boundary_trace_mismatch = 0.0;
  double field_scale = 0.0;
  bool trace_compatible = true;
};

// Pointwise initial state at x from the analytic u0, mu0 and lift.
class InitialStateBuilder {
 public:
  InitialStateBuilder(const InitialData& data, const BoundaryLift& lift, const MaterialSpec& spec);
  StateVector at(const Vec3& x, InitialStateReport* report = nullptr) const;
  Field field(const Grid& g, InitialStateReport* report = nullptr) const;

  Vec3 u0(const Vec3& x) const;
  Mat3 grad_u0(const Vec3& x) const;  // (j, a) = d_j u0_a
  Vec3 mu0(const Vec3& x) const;

 private:
  InitialData data_;
  std::array<std::array<Expr, 3>, 3> grad_;  // grad_[j][a]
  const BoundaryLift& lift_;
  const MaterialSpec& spec_;
};

struct PhysicalFields {
  Vec3 u = Vec3::Zero();
  Vec3 ut = Vec3::Zero();
  Mat3 grad = Mat3::Zero();  // (j, a) = d_j u_a
  Mat3 eps = Mat3::Zero();
  Mat3 sigma = Mat3::Zero();
  Vec3 mu = Vec3::Zero();
};

// sigma through the H-tensor route: sigma = H:eps + S mu / rho.
PhysicalFields recover_fields(const StateVector& v, const LiftSample& lift, const MaterialSample& m);
// sigma = C:eps + S d_t u, the constitutive law taken directly.
Mat3 stress_direct(const PhysicalFields& f, const MaterialSample& m);

struct CompatibilitySequence {
  std::vector<Field> v0p;
  std::vector<double> residuals;  // max |M v_{0,p}| over boundary nodes, per p
};

// Compatibility jets v_{0,p}, p = 0..s-1, with spatial derivatives by the
// solver's stencil of the given order; w comes from the lift.
CompatibilitySequence compatibility_sequence(const Grid& g, int order, const MaterialSpec& spec,
                                             const BoundaryLift& lift, const Field& v0, int s);

// max over boundary nodes and the faces each node lies on of |M(nu) v|_inf
double boundary_residual(const Grid& g, const MaterialSpec& spec, const Field& v, double t);

// Analytic rho e as expressions (used for exact time derivatives of w).
std::array<Expr, 3> boundary_source_rho_e_expr(const MaterialSpec& spec, const BoundaryLift& lift);

}  // namespace willis
