#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <random>

#include "commands.hpp"
#include "willis/io.hpp"
#include "willis/state.hpp"
#include "willis/verify.hpp"

namespace willis::cli {

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

Grid with_cells(const GridConfig& gc, int cells) {
  GridConfig c = gc;
  c.cells = {cells, cells, cells};
  return c.make();
}

struct Window {
  std::array<Field, 3> states;
  double t = 0.0;  // time of the middle state
  double dt = 0.0;
  Trajectory trajectory;
};

Window last_three(const WillisOperator& op, const Field& v0, double T) {
  Window w;
  std::vector<std::pair<double, Field>> ring;
  RunOptions ro;
  ro.T = T;
  ro.snapshot_every = 1;
  ro.keep_snapshots = false;
  ro.on_snapshot = [&](double t, const Field& v) {
    ring.emplace_back(t, v);
    if (ring.size() > 3) ring.erase(ring.begin());
  };
  w.trajectory = run(op, v0, ro);
  if (ring.size() < 3) throw std::invalid_argument("verification needs at least two time steps (increase T)");
  for (int l = 0; l < 3; ++l) w.states[l] = ring[l].second;
  w.t = ring[1].first;
  w.dt = w.trajectory.dt;
  return w;
}

double run_time(const RunConfig& cfg) {
  double T = cfg.verify_T > 0.0 ? cfg.verify_T : cfg.T;
  if (!(T > 0.0)) throw std::invalid_argument("verification needs T > 0 ([run] T or [verify] T)");
  return T;
}

int fine_cells(const RunConfig& cfg) { return cfg.fine_cells > 0 ? cfg.fine_cells : 2 * cfg.grid.cells[0]; }

// d_t u0 implied by the configured momentum and coupling
std::array<Expr, 3> initial_velocity(const MaterialSpec& spec, const InitialData& d) {
  static const Var axes[3] = {Var::x1, Var::x2, Var::x3};
  std::array<Expr, 3> ut;
  for (int i = 0; i < 3; ++i) {
    Expr m = d.mu0[i];
    for (int k = 0; k < 3; ++k)
      for (int l = 0; l < 3; ++l) {
        if (spec.S(k, l, i).is_zero()) continue;
        m = m - spec.S(k, l, i) * (0.5 * (d.u0[l].diff(axes[k]) + d.u0[k].diff(axes[l])));
      }
    ut[i] = m / spec.rho();
  }
  return ut;
}

Mat3 random_matrix(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Mat3 A;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) A(i, j) = u(rng);
  return A;
}

Vec3 random_vector(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return {u(rng), u(rng), u(rng)};
}

// nodes within 2h of a face carry more than the support threshold
bool touches_faces(const Grid& g, const Field& v, double rel) {
  const double thr = rel * v.max_abs();
  for (int k = 0; k < g.nodes(2); ++k)
    for (int j = 0; j < g.nodes(1); ++j)
      for (int i = 0; i < g.nodes(0); ++i) {
        int idx[3] = {i, j, k};
        bool near = false;
        for (int a = 0; a < 3; ++a) near = near || idx[a] < 2 || idx[a] > g.nodes(a) - 3;
        if (!near) continue;
        double s = 0.0;
        for (int c = 0; c < v.components(); ++c) s += v.at(c, g.index(i, j, k)) * v.at(c, g.index(i, j, k));
        if (std::sqrt(s) > thr) return true;
      }
  return false;
}

class Verifier {
 public:
  Verifier(const RunConfig& cfg) : cfg_(cfg), spec_(*cfg.material), lift_(cfg.make_lift()), grid_(cfg.grid.make()) {}

  void symmetry() {
    double asym = 0.0;
    MaterialSample m = centre_sample();
    Mat15 A0 = assemble_A0(m.C, m.rho);
    asym = (A0 - A0.transpose()).cwiseAbs().maxCoeff();
    SymmetrizedSystem s = symmetrize(assemble_unsymmetrized(m.C, m.rho, m.S), m.C);
    double gap = (s.A0 - A0).cwiseAbs().maxCoeff();
    for (int k = 0; k < 3; ++k) {
      Mat15 A = assemble_Ak(m.C, k);
      asym = std::max(asym, (A - A.transpose()).cwiseAbs().maxCoeff());
      gap = std::max(gap, (s.A[k] - A).cwiseAbs().maxCoeff());
    }
    if (asym == 0.0 && gap == 0.0) out_.pass("symmetry", "assembled matrices symmetric and equal to the row-combined system");
    else out_.fail("symmetry", "asymmetry " + num(asym) + ", symmetrization gap " + num(gap));
  }

  void kernels() {
    MaterialSample m = centre_sample();
    std::array<Mat15, 3> A{assemble_Ak(m.C, 0), assemble_Ak(m.C, 1), assemble_Ak(m.C, 2)};
    double res = 0.0, quad = 0.0;
    int dim = -1;
    bool same = true;
    for (int f = 0; f < 6; ++f) {
      Vec3 nu = Vec3::Zero();
      nu(f / 2) = f % 2 ? 1.0 : -1.0;
      NonnegativityReport r = check_maximal_nonnegative(assemble_boundary(m.C, A, nu));
      res = std::max({res, r.ker_A_nu_residual, r.ker_M_residual, r.ker_A_nu_converse_residual});
      quad = std::max(quad, r.max_abs_quadratic);
      if (dim < 0) dim = r.dim_ker_C_nu;
      same = same && dim == r.dim_ker_C_nu;
    }
    if (res <= 1e-10 && quad <= 1e-10 && same)
      out_.pass("kernels", "six faces: membership " + num(res) + ", quadratic form " + num(quad) + ", dim ker C_nu " +
                               std::to_string(dim));
    else
      out_.fail("kernels", "kernel characterization: membership " + num(res) + ", quadratic form " + num(quad) +
                               (same ? "" : ", dim ker C_nu differs between faces"));
  }

  void sweep() {
    std::vector<double> lams, mus;
    for (int i = 0; i <= 10; ++i) lams.push_back(-0.5 + 0.25 * i);
    for (int i = 1; i <= 8; ++i) mus.push_back(0.25 * i);
    int mismatches = 0;
    std::vector<std::vector<double>> rows;
    for (const A0SweepPoint& p : a0_definiteness_sweep(lams, mus)) {
      rows.push_back({p.lambda, p.mu, p.min_eigenvalue, static_cast<double>(p.sign)});
      MaterialSpec s = MaterialSpec::isotropic(1.0, p.lambda, p.mu, MaterialSpec::coupling_zero());
      Grid g = Grid::cube(0.0, 1.0, 8, BoundaryMode::periodic);
      bool refused = false;
      try {
        WillisOperator(g, s, BoundaryLift(), cfg_.scheme).check_A0(0.0);
      } catch (const SingularA0Error&) {
        refused = true;
      }
      if (refused != (p.sign <= 0)) ++mismatches;
    }
    write_csv(cfg_.output_dir + "/a0_sweep.csv", {"lambda", "mu", "min_eig", "sign"}, rows);
    if (mismatches == 0) out_.pass("sweep", "solver refuses exactly on the non-definite part of " + std::to_string(rows.size()) + " points");
    else out_.fail("sweep", std::to_string(mismatches) + " sweep points where refusal disagrees with the eigenvalue sign");
  }

  bool compact_data(const char* suite) {
    Field v0 = InitialStateBuilder(cfg_.initial, lift_, spec_).field(grid_);
    if (v0.max_abs() == 0.0 || !touches_faces(grid_, v0, RunOptions().support_threshold)) return true;
    out_.info(suite, "initial data are not compactly supported inside the box, skipped");
    return false;
  }

  void reduction() {
    if (!grid_.periodic() || !spec_.uniform()) {
      out_.fail("reduction", "needs a periodic grid and constant rho, C, S");
      return;
    }
    if (!compact_data("reduction")) return;
    const std::array<Expr, 3> ut0 = initial_velocity(spec_, cfg_.initial);
    ReductionOptions ro;
    ro.scheme = cfg_.scheme;
    ro.T = run_time(cfg_);
    ro.compare_every = 5;
    std::vector<std::vector<double>> rows;
    std::array<ReductionReport, 2> reps;
    const int cells[2] = {cfg_.grid.cells[0], fine_cells(cfg_)};
    for (int q = 0; q < 2; ++q) {
      reps[q] = reduction_check(with_cells(cfg_.grid, cells[q]), spec_, cfg_.initial.u0, ut0, ro);
      for (std::size_t i = 0; i < reps[q].times.size(); ++i)
        rows.push_back({static_cast<double>(cells[q]), reps[q].times[i], reps[q].willis_vs_classical[i],
                        reps[q].willis_vs_uncoupled[i]});
    }
    write_csv(cfg_.output_dir + "/reduction.csv", {"cells", "t", "willis_vs_classical", "willis_vs_uncoupled"}, rows);
    const double ratio = reps[0].final_difference() / reps[1].final_difference();
    const double need = 0.875 * std::pow(2.0, cfg_.scheme.order) * std::log2(double(cells[1]) / cells[0]);
    const double unc = std::max(reps[0].willis_vs_uncoupled.back(), reps[1].willis_vs_uncoupled.back());
    const double scale = l2_norm(grid_, displacement_part(reps[0].willis.final_state));
    out_.info("reduction", "max |S_ijk - S_jki| " + num(reps[0].max_cyclic_asymmetry) + ", coupled vs uncoupled " +
                               num(unc) + ", differences " + num(reps[0].final_difference()) + " -> " +
                               num(reps[1].final_difference()));
    bool ok = reps[0].max_cyclic_asymmetry == 0.0 && ratio >= need && unc <= 1e-10 * std::max(scale, 1.0) &&
              !reps[0].willis.wrap_risk && !reps[1].willis.wrap_risk;
    std::string msg = "difference ratio " + num(ratio) + " (need >= " + num(need) + ")";
    if (reps[0].willis.wrap_risk || reps[1].willis.wrap_risk) msg += ", support reached the periodic faces";
    if (ok) out_.pass("reduction", msg);
    else out_.fail("reduction", "constant totally symmetric coupling must not change displacements: " + msg);
    reduction_ = reps[0];
  }

  void propagation() {
    if (!reduction_ && !compact_data("propagation")) return;
    Trajectory tr;
    double speed;
    if (reduction_) {
      tr = reduction_->willis;
      speed = reduction_->propagation_speed;
    } else {
      WillisOperator op(grid_, spec_, lift_, cfg_.scheme);
      Field v0 = InitialStateBuilder(cfg_.initial, lift_, spec_).field(grid_);
      RunOptions ro;
      ro.T = run_time(cfg_);
      ro.keep_snapshots = false;
      tr = run(op, v0, ro);
      speed = max_characteristic_speed(grid_, spec_, 0.0, true);
    }
    PropagationCheck c = check_propagation(tr, speed, grid_.h_min());
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < tr.times.size(); ++i)
      rows.push_back({tr.times[i], tr.radius[i], tr.radius.front() + speed * tr.times[i] + c.tolerance});
    write_csv(cfg_.output_dir + "/propagation.csv", {"t", "radius", "bound"}, rows);
    std::string msg = "speed " + num(speed) + ", max step rate " + num(c.max_step_rate) + " (bound " +
                      num(c.step_rate_bound) + ")";
    out_.info("propagation_cone", "max r(t) - r(0) - c t " + num(c.max_excess) + " (2h = " +
                                      num(c.tolerance) + (c.within_cone ? ")" : ", exceeded)"));
    if (c.pass) out_.pass("propagation", msg);
    else out_.fail("propagation", "support grew faster than the characteristic speed: " + msg);
  }

  void galilean() {
    WillisOperator op(grid_, spec_, lift_, cfg_.scheme);
    Field v0 = InitialStateBuilder(cfg_.initial, lift_, spec_).field(grid_);
    Window w = last_three(op, v0, run_time(cfg_));
    ResidualOptions ro;
    ro.order = cfg_.scheme.order;
    std::mt19937_64 rng(2024);
    double noise = 0.0;
    for (int q = 0; q < 10; ++q) {
      GalileanTransform tr;
      Mat3 A = random_matrix(rng);
      tr.A0 = A - A.transpose();
      tr.b0 = random_vector(rng);
      tr.b1 = random_vector(rng);
      noise = std::max(noise, galilean_check(grid_, spec_, lift_, w.states, w.t, w.dt, tr, ro).max_pointwise_defect);
    }
    if (noise <= 1e-10) out_.pass("galilean", "10 skew transforms: max residual defect " + num(noise));
    else out_.fail("galilean", "residual functional not invariant under skew transforms: defect " + num(noise));

    GalileanTransform ext;
    ext.A0 = random_matrix(rng);
    ext.A1 = random_matrix(rng);
    ext.b0 = random_vector(rng);
    ext.b1 = random_vector(rng);
    MaterialSpec plain = spec_.with_coupling(MaterialSpec::coupling_zero());
    double d0 = galilean_check(grid_, plain, lift_, w.states, w.t, w.dt, ext, ro).max_pointwise_defect;
    if (d0 <= 1e-10) out_.pass("galilean_extended_uncoupled", "S = 0: defect " + num(d0));
    else out_.fail("galilean_extended_uncoupled", "classical system not invariant under time-linear transforms: defect " + num(d0));

    // first-pair symmetric coupling without cyclic symmetry
    CouplingTensor S;
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j)
        for (int k = 0; k < 3; ++k) S(i, j, k) = S(j, i, k) = 0.3 * std::uniform_real_distribution<double>(-1, 1)(rng);
    MaterialSpec pair = spec_.with_coupling(MaterialSpec::coupling_constant(S));
    double gap = galilean_check(grid_, pair, lift_, w.states, w.t, w.dt, ext, ro).max_pointwise_defect;
    double floor = std::max(noise, d0);
    if (gap > 10.0 * floor) out_.pass("galilean_extended_coupled", "gap " + num(gap) + " vs noise floor " + num(floor));
    else out_.fail("galilean_extended_coupled", "expected non-invariance with coupling: gap " + num(gap) + " vs noise floor " + num(floor));
    double own = galilean_check(grid_, spec_, lift_, w.states, w.t, w.dt, ext, ro).max_pointwise_defect;
    out_.info("galilean_extended_configured", "configured coupling: defect " + num(own) +
                                                  " (zero for totally symmetric S)");
  }

  void hooke() {
    MaterialSpec plain = spec_.with_coupling(MaterialSpec::coupling_zero());
    WillisOperator op(grid_, plain, lift_, cfg_.scheme);
    InitialData d = cfg_.initial;
    Field v0 = InitialStateBuilder(d, lift_, plain).field(grid_);
    RunOptions ro;
    ro.T = run_time(cfg_);
    ro.keep_snapshots = false;
    ro.snapshot_every = 5;
    double worst = 0.0;
    ro.on_snapshot = [&](double t, const Field& v) {
      worst = std::max(worst, hooke_recovery_error(grid_, plain, lift_, v, t));
    };
    run(op, v0, ro);
    if (worst <= 1e-12) out_.pass("hooke", "S = 0 stress recovery matches C:eps within " + num(worst));
    else out_.fail("hooke", "stress recovery with S = 0 deviates from C:eps by " + num(worst) + " (relative)");
  }

  void compatibility() {
    if (grid_.periodic()) {
      out_.info("compatibility", "periodic grid: no boundary, skipped");
      return;
    }
    std::array<std::vector<double>, 2> res;
    std::array<double, 2> h{};
    const int cells[2] = {cfg_.grid.cells[0], fine_cells(cfg_)};
    double scale = 0.0;
    for (int q = 0; q < 2; ++q) {
      Grid g = with_cells(cfg_.grid, cells[q]);
      h[q] = g.h_min();
      Field v0 = InitialStateBuilder(cfg_.initial, lift_, spec_).field(g);
      scale = std::max(scale, v0.max_abs());
      res[q] = compatibility_sequence(g, cfg_.scheme.order, spec_, lift_, v0, 2).residuals;
    }
    bool ok = true;
    std::string msg;
    const double need = cfg_.scheme.order - 0.2;
    for (int p = 0; p < 2; ++p) {
      double o = std::log(res[0][p] / res[1][p]) / std::log(h[0] / h[1]);
      bool exact = res[0][p] <= 1e-12 * std::max(scale, 1.0) && res[1][p] <= 1e-12 * std::max(scale, 1.0);
      msg += " p=" + std::to_string(p) + ": " + num(res[0][p]) + " -> " + num(res[1][p]) +
             (exact ? " (exact)" : " (order " + num(o) + ")");
      ok = ok && (exact || o >= need);
    }
    if (ok) out_.pass("compatibility", "boundary residuals" + msg);
    else out_.fail("compatibility", "initial data violate the compatibility conditions:" + msg);
  }

  void residuals() {
    const int cells[2] = {cfg_.grid.cells[0], fine_cells(cfg_)};
    std::array<double, 2> r1{}, r2{}, h{};
    ResidualOptions ro;
    ro.order = cfg_.scheme.order;
    // bounded boxes: skip the layer the boundary closure can reach by T
    const double layer = max_characteristic_speed(grid_, spec_, 0.0, true) * run_time(cfg_) +
                         cfg_.scheme.order * grid_.h_min();
    for (int q = 0; q < 2; ++q) {
      Grid g = with_cells(cfg_.grid, cells[q]);
      h[q] = g.h_min();
      if (!g.periodic()) ro.margin = static_cast<int>(std::ceil(layer / h[q]));
      WillisOperator op(g, spec_, lift_, cfg_.scheme);
      Field v0 = InitialStateBuilder(cfg_.initial, lift_, spec_).field(g);
      Window w = last_three(op, v0, run_time(cfg_));
      FieldWindow fw;
      std::array<Field, 3> ut;
      for (int l = 0; l < 3; ++l) {
        fw[l] = physical_fields(g, spec_, lift_, w.states[l], w.t + (l - 1) * w.dt);
        ut[l] = displacement_part(w.states[l]);
      }
      r1[q] = residual_willis(g, spec_, fw, ro).max_all();
      r2[q] = residual_second_order(g, spec_, lift_, ut, w.t, w.dt, ro).max[0];
    }
    const double o1 = std::log(r1[0] / r1[1]) / std::log(h[0] / h[1]);
    const double o2 = std::log(r2[0] / r2[1]) / std::log(h[0] / h[1]);
    // centered time differences cap the observable order at 2
    const double need = std::min(cfg_.scheme.order, 2) - 0.2;
    std::string msg = "original system " + num(r1[0]) + " -> " + num(r1[1]) + " (order " + num(o1) +
                      "), second-order form " + num(r2[0]) + " -> " + num(r2[1]) + " (order " + num(o2) + ")";
    if (o1 >= need && o2 >= need) out_.pass("residuals", msg);
    else out_.fail("residuals", "formulation residuals do not converge at the expected order: " + msg);
  }

  void energy() {
    if (!lift_.is_zero()) {
      out_.info("energy", "nonzero lift (w != 0): bound not applicable, skipped");
      return;
    }
    WillisOperator op(grid_, spec_, lift_, cfg_.scheme);
    Field v0 = InitialStateBuilder(cfg_.initial, lift_, spec_).field(grid_);
    RunOptions ro;
    ro.T = run_time(cfg_);
    ro.keep_snapshots = false;
    Trajectory tr = run(op, v0, ro);
    double C = 0.0;
    for (double t : {0.0, 0.5 * ro.T, ro.T}) C = std::max(C, coefficient_bound(grid_, spec_, t));
    double worst = -INFINITY;
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
      double bound = tr.energy.front() * std::exp(1.5 * C * tr.times[i]);
      rows.push_back({tr.times[i], tr.energy[i], bound});
      worst = std::max(worst, tr.energy[i] - bound);
    }
    write_csv(cfg_.output_dir + "/energy.csv", {"t", "E", "bound"}, rows);
    std::string msg = "C = " + num(C) + ", max E - bound " + num(worst);
    if (worst <= 0.0) out_.pass("energy", msg);
    else out_.fail("energy", "discrete energy exceeds E(0) exp(1.5 C t): " + msg);
  }

  Outcome& outcome() { return out_; }

 private:
  MaterialSample centre_sample() const {
    Vec3 c;
    for (int a = 0; a < 3; ++a) c(a) = 0.5 * (cfg_.grid.lower[a] + cfg_.grid.upper[a]);
    return spec_.sample(c(0), c(1), c(2), 0.0);
  }

  const RunConfig& cfg_;
  const MaterialSpec& spec_;
  BoundaryLift lift_;
  Grid grid_;
  Outcome out_;
  std::optional<ReductionReport> reduction_;
};

}  // namespace

int run_verify(const RunConfig& cfg, const std::vector<std::string>& requested) {
  std::vector<std::string> suites = requested.empty() ? cfg.suites : requested;
  const std::vector<std::string> order = {"symmetry",  "kernels", "sweep",         "reduction", "propagation",
                                          "galilean",  "hooke",   "compatibility", "residuals", "energy"};
  auto wanted = [&](const std::string& s) {
    return std::find(suites.begin(), suites.end(), s) != suites.end() ||
           std::find(suites.begin(), suites.end(), "all") != suites.end();
  };
  for (const std::string& s : suites)
    if (s != "all" && std::find(order.begin(), order.end(), s) == order.end()) {
      std::cerr << "FAIL verify: unknown suite '" << s << "'\n";
      return 2;
    }
  ensure_directory(cfg.output_dir);
  Verifier v(cfg);
  for (const std::string& s : order) {
    if (!wanted(s)) continue;
    if (s == "symmetry") v.symmetry();
    else if (s == "kernels") v.kernels();
    else if (s == "sweep") v.sweep();
    else if (s == "reduction") v.reduction();
    else if (s == "propagation") v.propagation();
    else if (s == "galilean") v.galilean();
    else if (s == "hooke") v.hooke();
    else if (s == "compatibility") v.compatibility();
    else if (s == "residuals") v.residuals();
    else if (s == "energy") v.energy();
  }
  v.outcome().write_summary(cfg.output_dir, "verify_summary.txt");
  return v.outcome().exit_code();
}

}  // namespace willis::cli
