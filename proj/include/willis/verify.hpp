#pragma once

#include <array>
#include <string>
#include <vector>

#include "willis/solver.hpp"
#include "willis/state.hpp"

namespace willis {

// Physical fields on the grid at one time level.
struct GridFields {
  double time = 0.0;
  Field u;      // 3
  Field ut;     // 3
  Field grad;   // 9, d_j u_a at 3j + a
  Field sigma;  // 9, sigma_ij at 3i + j
  Field mu;     // 3
};

// From a solver state: u = u~ + ubar, and sigma, mu through recover_fields.
GridFields physical_fields(const Grid& g, const MaterialSpec& spec, const BoundaryLift& lift, const Field& v, double t);
// sigma = C eps + S ut and mu = rho ut + S_kli eps_kl from given u, ut, grad.
GridFields constitutive_fields(const Grid& g, const MaterialSpec& spec, Field u, Field ut, Field grad, double t);

struct ResidualReport {
  std::vector<std::string> equations;
  std::vector<double> max;
  std::vector<double> l2;
  double h = 0.0;
  double time = 0.0;
  double max_all() const;
};

struct ResidualOptions {
  int order = 2;
  int margin = -1;  // nodes skipped next to each face; -1: 0 periodic, `order` bounded
};

// Three time levels t - dt, t, t + dt.
using FieldWindow = std::array<GridFields, 3>;

// Pointwise residuals of the original system at the middle level:
// components 0..2   d_t mu_i - D_j sigma_ij
//            3..11  sigma_ij - C_ijkl eps_h(u)_kl - S_ijk d_t u_k
//            12..14 mu_i - rho d_t u_i - S_kli eps_h(u)_kl
// d_t by centered differences of the levels, D by the scheme's stencil.
Field willis_residual_field(const Grid& g, const MaterialSpec& spec, const FieldWindow& w, const ResidualOptions& opt);
ResidualReport residual_willis(const Grid& g, const MaterialSpec& spec, const FieldWindow& w, const ResidualOptions& opt);

// Coefficients of the second-order form for u~ at one time:
// rho d_tt u_i = C_ijkl d_j d_k u_l + K_ikl d_k u_l + V_ik d_t u_k + Q_ijk d_j d_t u_k - rho e_i
// with K_ikl = d_j C_ijkl - d_t S_kli, V_ik = d_j S_ijk - d_t rho delta_ik,
// Q_ijk = S_ijk - S_jki.
struct SecondOrderCoefficients {
  bool uniform = true;
  double time = 0.0;
  std::vector<double> rho, C, K, V, Q, rho_e;  // 1, 81, 27, 9, 27, 3 per node
  double max_abs_Q = 0.0;
  std::size_t node(std::size_t p) const { return uniform ? 0 : p; }
};
SecondOrderCoefficients second_order_coefficients(const Grid& g, const MaterialSpec& spec, const BoundaryLift& lift,
                                                  double t);

// Right-hand side of the second-order form (everything but rho d_tt u) for
// 3-component u, ut.  Mixed derivatives compose first-derivative stencils,
// pure ones use compact central second differences (zero where they do not
// fit on a bounded box).
void second_order_rhs(const Grid& g, const SecondOrderCoefficients& c, int order, const Field& u, const Field& ut,
                      Field& out);

// Residual of the second-order form from u~ at three time levels; reports the
// full residual and, separately, the size of the Q term.
ResidualReport residual_second_order(const Grid& g, const MaterialSpec& spec, const BoundaryLift& lift,
                                     const std::array<Field, 3>& u_tilde, double t, double dt,
                                     const ResidualOptions& opt);

// Method-of-lines solver of the second-order form in (u, d_t u) on a periodic
// grid with time-independent coefficients and zero lift; classical
// elastodynamics when S = 0.
class DisplacementSolver {
 public:
  DisplacementSolver(const Grid& g, const MaterialSpec& spec, int order);
  // y has 6 components: u, then d_t u
  void apply(const Field& y, Field& dydt) const;
  void step(Field& y, double dt) const;

 private:
  Grid grid_;
  int order_;
  SecondOrderCoefficients coef_;
};

// Displacement/velocity components of a 15-component state as 3-component fields.
Field displacement_part(const Field& v);
Field velocity_part(const Field& v);
double l2_norm(const Grid& g, const Field& f);
double l2_difference(const Grid& g, const Field& a, const Field& b);

struct ReductionReport {
  double max_cyclic_asymmetry = 0.0;  // max |S_ijk - S_jki|
  double h = 0.0;
  double dt = 0.0;
  int steps = 0;
  std::vector<double> times;
  std::vector<double> willis_vs_classical;  // L2 of u difference, first-order Willis vs displacement S = 0
  std::vector<double> willis_vs_uncoupled;  // L2 of u difference, first-order with S vs with S = 0
  double final_difference() const { return willis_vs_classical.empty() ? 0.0 : willis_vs_classical.back(); }
  double propagation_speed = 0.0;  // all-directions characteristic speed bound
  Trajectory willis;
};

struct ReductionOptions {
  SchemeConfig scheme;
  double T = 0.2;
  int compare_every = 0;  // steps between comparisons; 0 = final only
  bool require_constant = true;
  bool run_uncoupled = true;
};

// Willis first-order run with S against the classical S = 0 run from the
// same (u0, d_t u0); mu0 = rho ut0 + S_kli eps(u0)_kl for the Willis run.
ReductionReport reduction_check(const Grid& g, const MaterialSpec& spec, const std::array<Expr, 3>& u0,
                              const std::array<Expr, 3>& ut0, const ReductionOptions& opt);

struct PropagationCheck {
  double speed = 0.0;
  double tolerance = 0.0;            // 2h
  double max_excess = 0.0;           // max_t r(t) - r(0) - speed t
  double max_step_rate = 0.0;        // max (r_{n+1} - r_n) / dt
  double step_rate_bound = 0.0;      // speed + 2h/dt
  bool pass = false;                 // per-step rate within the bound
  bool within_cone = false;          // cumulative excess within 2h (diagnostic)
};
PropagationCheck check_propagation(const Trajectory& tr, double speed, double h);

struct GalileanTransform {
  Mat3 A0 = Mat3::Zero();  // u' = u + (A0 + t A1) x + b0 + t b1
  Mat3 A1 = Mat3::Zero();
  Vec3 b0 = Vec3::Zero();
  Vec3 b1 = Vec3::Zero();
  bool extended() const { return A1.cwiseAbs().maxCoeff() > 0.0; }
  bool skew_constant() const { return !extended() && (A0 + A0.transpose()).cwiseAbs().maxCoeff() == 0.0; }
};

struct GalileanReport {
  ResidualReport original;
  ResidualReport transformed;
  double max_pointwise_defect = 0.0;  // max |R(transformed) - R(original)|
  double norm_difference = 0.0;       // max over equations |max R' - max R|
};

// Applies the transform to (u, d_t u, grad u) recovered from three solver
// states, recomputes sigma and mu through the constitutive laws of `spec`
// for both field sets and compares the residual functionals.
GalileanReport galilean_check(const Grid& g, const MaterialSpec& spec, const BoundaryLift& lift,
                              const std::array<Field, 3>& states, double t, double dt, const GalileanTransform& tr,
                              const ResidualOptions& opt);

// u~ = U(x) cos(omega t), zero lift.
struct ManufacturedSolution {
  std::array<Expr, 3> U;
  double omega = 1.0;
};

struct ConvergenceLevel {
  int cells = 0;
  double h = 0.0;
  double dt = 0.0;
  double err_grad = 0.0, err_vel = 0.0, err_disp = 0.0, err_max = 0.0;
  double forcing_consistency = 0.0;  // max |non-momentum forcing rows|
};

struct ConvergenceReport {
  int order = 2;
  std::vector<ConvergenceLevel> levels;
  std::vector<double> order_grad, order_vel, order_disp, order_max;  // between consecutive levels
  bool monotone = true;
  double min_order() const;
};

struct ConvergenceOptions {
  SchemeConfig scheme;
  double lower = 0.0, upper = 1.0;
  BoundaryMode mode = BoundaryMode::periodic;
  double T = 0.1;
  double dt_factor = 1.0;  // dt = dt_factor * CFL step
};

// Exact momentum forcing for the manufactured solution, as cos(omega t) Fc +
// sin(omega t) Fs on the grid.
struct ManufacturedForcing {
  std::vector<double> Fc, Fs;  // 3 * n
  double max_non_momentum = 0.0;
};
ManufacturedForcing manufactured_forcing(const Grid& g, const MaterialSpec& spec, const ManufacturedSolution& ms);
Field manufactured_state(const Grid& g, const ManufacturedSolution& ms, double t);

ConvergenceReport convergence_study(const MaterialSpec& spec, const ManufacturedSolution& ms,
                                    const std::vector<int>& cells, const ConvergenceOptions& opt);

// max |sigma (H route) - C eps| / max |C eps| over nodes.
double hooke_recovery_error(const Grid& g, const MaterialSpec& spec, const BoundaryLift& lift, const Field& v,
                            double t);

}  // namespace willis
