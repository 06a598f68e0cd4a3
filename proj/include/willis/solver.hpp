#pragma once

#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "willis/assembly.hpp"
#include "willis/grid.hpp"
#include "willis/material.hpp"

namespace willis {

struct SchemeConfig {
  int order = 2;             // 2 or 4
  double cfl = 0.4;          // in (0, 1]
  double dissipation = 0.0;  // Kreiss-Oliger coefficient, >= 0
  void validate() const;
};

class SingularA0Error : public std::runtime_error {
 public:
  SingularA0Error(const std::string& msg, Vec3 x, double min_eig)
      : std::runtime_error(msg), point(x), min_eigenvalue(min_eig) {}
  Vec3 point;
  double min_eigenvalue;
};

class InstabilityError : public std::runtime_error {
 public:
  InstabilityError(const std::string& msg, int step, double t) : std::runtime_error(msg), step(step), time(t) {}
  int step;
  double time;
};

// Per-node coefficients of the first-order system at one time.
struct CoefficientCache {
  double time = 0.0;
  bool uniform = true;
  std::vector<double> inv_rho;  // 1 or n
  std::vector<double> C;        // 81 per node
  std::vector<double> D;        // 27 per node, D(i, 3k+l) at 9i + 3k + l
  std::vector<double> V;        // 9 per node
  std::vector<double> w;        // 3 per node (components 10..12 of w)
  bool has_D = false, has_V = false, has_w = false;
  std::size_t node(std::size_t p) const { return uniform ? 0 : p; }
};

// Adds a momentum source (components 10..12 of w) at time t: f[a][p] += ...
using MomentumSource = std::function<void(double t, std::array<double*, 3> f)>;

enum class KernelKind { parallel, reference };

// Semi-discrete operator dv/dt = A0^{-1}(w - sum_k A_k D_k v - B v) + dissipation.
class WillisOperator {
 public:
  WillisOperator(const Grid& g, const MaterialSpec& spec, const BoundaryLift& lift, SchemeConfig scheme);

  const Grid& grid() const { return grid_; }
  const MaterialSpec& spec() const { return spec_; }
  const BoundaryLift& lift() const { return lift_; }
  const SchemeConfig& scheme() const { return scheme_; }

  void set_source(MomentumSource src) { source_ = std::move(src); }

  // OpenMP structured kernel.
  void apply(const Field& v, double t, Field& dvdt) const;
  // Serial dense kernel: assembles the 15x15 system per node and solves A0.
  void apply_reference(const Field& v, double t, Field& dvdt) const;
  void apply(KernelKind kind, const Field& v, double t, Field& dvdt) const {
    kind == KernelKind::parallel ? apply(v, t, dvdt) : apply_reference(v, t, dvdt);
  }

  // Bounded-box boundary treatment (no-op on periodic grids).
  void enforce_boundary(Field& v) const;
  // Largest distance of the gradient blocks from ker(C_nu), or |u~|, over
  // edge and corner nodes (where two or three faces meet).
  double corner_residual(const Field& v) const;

  // Checks A0 at every node (or the single node of a uniform spec) at time t;
  // throws SingularA0Error unless warn_only.
  A0Report check_A0(double t, bool warn_only = false) const;

  const CoefficientCache& coefficients(double t) const;

 private:
  void build_cache(CoefficientCache& c, double t) const;

  Grid grid_;
  const MaterialSpec& spec_;
  const BoundaryLift& lift_;
  SchemeConfig scheme_;
  std::array<AxisStencil, 3> d_, q_;
  std::array<std::vector<std::array<std::ptrdiff_t, AxisStencil::kMaxWidth>>, 3> d_off_, q_off_;
  MomentumSource source_;
  mutable std::map<double, std::unique_ptr<CoefficientCache>> cache_;
  // boundary projectors onto ker(C_nu), per boundary node and face
  struct FaceProjector {
    std::size_t node;
    int axis;
    int side;
    Mat9 P;
  };
  std::vector<FaceProjector> projectors_;
};

// One explicit RK4 step.
void rk4_step(const WillisOperator& op, KernelKind kind, Field& v, double t, double dt);

// Discrete energy sum <A0 v, v> h^3 (trapezoid weights on bounded boxes).
double energy(const WillisOperator& op, const Field& v, double t);

// Radius of the smallest origin-centered ball holding every node with
// |v|_2 > threshold.
double support_radius(const Grid& g, const Field& v, double threshold);

// Generalized eigenvalues of (A_nu, A0), sorted ascending.
Eigen::VectorXd characteristic_speeds(const Mat15& A0, const Mat15& A_nu);

// Largest |speed| over nodes (subsampled to at most ~4096 points) and the
// coordinate axes; with all_directions, over 26 lattice directions and 200
// random unit normals instead (the bound relevant for propagation of support).
double max_characteristic_speed(const Grid& g, const MaterialSpec& spec, double t, bool all_directions = false);

double cfl_dt(double h_min, double max_speed, double cfl);

// max ||A0^-1|| (||B|| + sum_k ||d_k A_k|| + ||d_t A0||) over (subsampled) nodes.
double coefficient_bound(const Grid& g, const MaterialSpec& spec, double t);

struct RunOptions {
  double T = 0.0;
  double dt = 0.0;           // 0 = from CFL
  int snapshot_every = 0;    // steps between stored snapshots; 0 = initial and final only
  bool keep_snapshots = true;
  double support_threshold = 1e-3;  // relative to max |v(0)|
  bool warn_only_A0 = false;
  KernelKind kernel = KernelKind::parallel;
  std::function<void(double t, const Field& v)> on_snapshot;
};

struct Trajectory {
  std::vector<double> times;  // trace times (every step)
  std::vector<double> energy;
  std::vector<double> radius;
  std::vector<double> snapshot_times;
  std::vector<Field> snapshots;
  Field final_state;
  double dt = 0.0;
  int steps = 0;
  double max_speed = 0.0;
  double max_corner_residual = 0.0;
  // periodic runs: support came within 2h of the box faces (wrap-around risk)
  bool wrap_risk = false;
};

Trajectory run(const WillisOperator& op, const Field& v0, const RunOptions& opt);

// Least-squares slope of log(E/E0) against t, and max_t log(E/E0)/t.
struct GrowthFit {
  double fitted_rate = 0.0;
  double max_rate = 0.0;
};
GrowthFit fit_growth(const std::vector<double>& t, const std::vector<double>& E);

}  // namespace willis
