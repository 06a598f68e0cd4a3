#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "willis/io.hpp"
#include "willis/state.hpp"

namespace willis::cli {

void Outcome::pass(const std::string& check, const std::string& detail) {
  lines_.push_back("PASS " + check + ": " + detail);
  std::cout << lines_.back() << "\n";
}

void Outcome::fail(const std::string& check, const std::string& detail) {
  lines_.push_back("FAIL " + check + ": " + detail);
  failures_.push_back(check);
  std::cout << lines_.back() << "\n";
  std::cerr << lines_.back() << "\n";
}

void Outcome::info(const std::string& check, const std::string& detail) {
  lines_.push_back("INFO " + check + ": " + detail);
  std::cout << lines_.back() << "\n";
}

void Outcome::write_summary(const std::string& dir, const std::string& name) const {
  ensure_directory(dir);
  std::ofstream out(dir + "/" + name);
  for (const std::string& l : lines_) out << l << "\n";
  out << (ok() ? "status: pass" : "status: fail") << "\n";
  if (!ok()) {
    out << "failures:";
    for (const std::string& f : failures_) out << ' ' << f;
    out << "\n";
  }
}

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

std::vector<Vec3> sample_nodes(const Grid& g, const MaterialSpec& spec) {
  std::vector<Vec3> pts;
  if (spec.uniform()) return {g.point(g.nodes(0) / 2, g.nodes(1) / 2, g.nodes(2) / 2)};
  int st[3];
  for (int a = 0; a < 3; ++a) st[a] = std::max(1, (g.nodes(a) + 7) / 8);
  for (int k = 0; k < g.nodes(2); k += st[2])
    for (int j = 0; j < g.nodes(1); j += st[1])
      for (int i = 0; i < g.nodes(0); i += st[0]) pts.push_back(g.point(i, j, k));
  return pts;
}

const char* kFaceNames[6] = {"-x1", "+x1", "-x2", "+x2", "-x3", "+x3"};

Vec3 face_normal(int f) {
  Vec3 nu = Vec3::Zero();
  nu(f / 2) = f % 2 == 0 ? -1.0 : 1.0;
  return nu;
}

Vec3 face_centre(const GridConfig& gc, int f) {
  Vec3 x;
  for (int a = 0; a < 3; ++a) x(a) = 0.5 * (gc.lower[a] + gc.upper[a]);
  x(f / 2) = f % 2 == 0 ? gc.lower[f / 2] : gc.upper[f / 2];
  return x;
}

}  // namespace

int run_validate(const RunConfig& cfg) {
  Outcome out;
  const Grid g = cfg.grid.make();
  const MaterialSpec& spec = *cfg.material;
  const std::vector<Vec3> pts = sample_nodes(g, spec);

  double elastic_bad = 0, coupling_bad = 0, asym = 0.0, sym_gap = 0.0, min_eig = INFINITY;
  Vec3 worst = Vec3::Zero();
  for (const Vec3& x : pts) {
    MaterialSample m = spec.sample(x(0), x(1), x(2), 0.0);
    if (!validate_elastic(m.C, 1e-12).ok()) ++elastic_bad;
    CouplingReport cr = validate_coupling(m.S, 1e-12);
    if (cr.status != CouplingSymmetry::totally_symmetric) ++coupling_bad;
    Mat15 A0 = assemble_A0(m.C, m.rho);
    asym = std::max(asym, (A0 - A0.transpose()).cwiseAbs().maxCoeff());
    for (int k = 0; k < 3; ++k) {
      Mat15 A = assemble_Ak(m.C, k);
      asym = std::max(asym, (A - A.transpose()).cwiseAbs().maxCoeff());
    }
    if (cr.status == CouplingSymmetry::totally_symmetric) {
      SymmetrizedSystem s = symmetrize(assemble_unsymmetrized(m.C, m.rho, m.S), m.C);
      sym_gap = std::max(sym_gap, (s.A0 - A0).cwiseAbs().maxCoeff());
      for (int k = 0; k < 3; ++k) sym_gap = std::max(sym_gap, (s.A[k] - assemble_Ak(m.C, k)).cwiseAbs().maxCoeff());
    }
    A0Report r = inspect_A0(A0);
    if (r.min_eigenvalue < min_eig) {
      min_eig = r.min_eigenvalue;
      worst = x;
    }
  }
  const std::string n = std::to_string(pts.size()) + " sample points";
  if (elastic_bad == 0) out.pass("elasticity", "major/minor symmetry and positive definiteness on symmetric matrices at " + n);
  else out.fail("elasticity", "stiffness not admissible at " + num(elastic_bad) + " of " + n);
  if (coupling_bad == 0) out.pass("coupling", "coupling tensor totally symmetric at " + n);
  else out.fail("coupling", "coupling tensor violates S_ijk = S_jki at " + num(coupling_bad) + " of " + n);
  if (asym == 0.0) out.pass("matrix_symmetry", "A0 and A1..A3 exactly symmetric");
  else out.fail("matrix_symmetry", "max |A - A^T| = " + num(asym));
  if (sym_gap == 0.0) out.pass("symmetrization", "row-combined system equals direct assembly entrywise");
  else out.fail("symmetrization", "max entry gap " + num(sym_gap));
  {
    A0Report r = inspect_A0(assemble_A0(spec.sample(worst(0), worst(1), worst(2), 0.0).C,
                                        spec.sample(worst(0), worst(1), worst(2), 0.0).rho));
    out.info("a0_definiteness", "min eigenvalue " + num(min_eig) + (r.positive_definite
                                    ? " (positive definite)"
                                    : " (not positive definite: solve refuses unless warn_only_a0)"));
  }

  int dim0 = -1;
  bool dims_equal = true;
  double mem = 0.0, quad = 0.0;
  std::vector<std::vector<double>> rows;
  for (int f = 0; f < 6; ++f) {
    Vec3 x = face_centre(cfg.grid, f);
    MaterialSample m = spec.sample(x(0), x(1), x(2), 0.0);
    std::array<Mat15, 3> A{assemble_Ak(m.C, 0), assemble_Ak(m.C, 1), assemble_Ak(m.C, 2)};
    NonnegativityReport r = check_maximal_nonnegative(assemble_boundary(m.C, A, face_normal(f)));
    mem = std::max({mem, r.ker_A_nu_residual, r.ker_M_residual, r.ker_A_nu_converse_residual});
    quad = std::max(quad, r.max_abs_quadratic);
    if (dim0 < 0) dim0 = r.dim_ker_C_nu;
    dims_equal = dims_equal && r.dim_ker_C_nu == dim0;
    out.info(std::string("face ") + kFaceNames[f],
             "dim ker C_nu " + std::to_string(r.dim_ker_C_nu) + ", dim ker A_nu " + std::to_string(r.dim_ker_A_nu) +
                 ", dim ker M " + std::to_string(r.dim_ker_M) + ", nonnegative eigenvalues of A_nu " +
                 std::to_string(r.nonnegative_eigenvalues) + (r.maximal ? ", maximal" : ", not maximal"));
  }
  if (mem <= 1e-10) out.pass("kernel_membership", "kernel residuals " + num(mem));
  else out.fail("kernel_membership", "kernel characterization residual " + num(mem) + " > 1e-10");
  if (quad <= 1e-10) out.pass("boundary_quadratic", "<A_nu z, z> on ker M within " + num(quad));
  else out.fail("boundary_quadratic", "<A_nu z, z> on ker M reaches " + num(quad));
  if (dims_equal) out.pass("kernel_dimension", "dim ker C_nu = " + std::to_string(dim0) + " on all faces");
  else out.fail("kernel_dimension", "dim ker C_nu differs between faces");

  std::vector<double> lams, mus;
  for (int i = 0; i <= 10; ++i) lams.push_back(-0.5 + 0.25 * i);
  for (int i = 1; i <= 8; ++i) mus.push_back(0.25 * i);
  auto sweep = a0_definiteness_sweep(lams, mus);
  int pos = 0, zero = 0, neg = 0;
  for (const auto& p : sweep) {
    rows.push_back({p.lambda, p.mu, p.min_eigenvalue, static_cast<double>(p.sign)});
    (p.sign > 0 ? pos : (p.sign == 0 ? zero : neg))++;
  }
  ensure_directory(cfg.output_dir);
  write_csv(cfg.output_dir + "/a0_sweep.csv", {"lambda", "mu", "min_eig", "sign"}, rows);
  out.info("a0_sweep", std::to_string(sweep.size()) + " isotropic points (rho = 1): " + std::to_string(pos) +
                           " definite, " + std::to_string(zero) + " singular, " + std::to_string(neg) +
                           " indefinite; written to a0_sweep.csv");

  if (!g.periodic()) {
    InitialStateReport rep;
    InitialStateBuilder(cfg.initial, cfg.make_lift(), spec).field(g, &rep);
    if (rep.trace_compatible) out.pass("initial_trace", "u0 matches the lift on the boundary");
    else out.fail("initial_trace", "u0 differs from the lift on the boundary by " + num(rep.boundary_trace_mismatch));
  }
  out.write_summary(cfg.output_dir, "validate_summary.txt");
  return out.exit_code();
}

int run_assemble(const RunConfig& cfg) {
  const MaterialSpec& spec = *cfg.material;
  const BoundaryLift lift = cfg.make_lift();
  ensure_directory(cfg.output_dir);
  std::vector<std::pair<std::string, Vec3>> points;
  Vec3 c;
  for (int a = 0; a < 3; ++a) c(a) = 0.5 * (cfg.grid.lower[a] + cfg.grid.upper[a]);
  points.push_back({"centre", c});
  for (int f = 0; f < 6; ++f) points.push_back({std::string("face") + kFaceNames[f], face_centre(cfg.grid, f)});
  int files = 0;
  auto emit = [&](const std::string& name, const MatX& m) {
    write_matrix(cfg.output_dir + "/" + name + ".txt", m);
    ++files;
  };
  for (std::size_t q = 0; q < points.size(); ++q) {
    const auto& [tag, x] = points[q];
    MaterialSample m = spec.sample(x(0), x(1), x(2), 0.0);
    PointSystem ps = assemble_point(m, lift.sample(x(0), x(1), x(2), 0.0));
    emit(tag + "_A0", ps.A0);
    for (int k = 0; k < 3; ++k) emit(tag + "_A" + std::to_string(k + 1), ps.A[k]);
    emit(tag + "_B", ps.B);
    emit(tag + "_w", ps.w);
    UnsymmetrizedSystem u = assemble_unsymmetrized(m.C, m.rho, m.S);
    emit(tag + "_A0_unsym", u.A0);
    for (int k = 0; k < 3; ++k) emit(tag + "_A" + std::to_string(k + 1) + "_unsym", u.A[k]);
    emit(tag + "_T", symmetrization_transform(m.C));
    if (q > 0) {
      Vec3 nu = face_normal(static_cast<int>(q) - 1);
      BoundaryPoint bp = assemble_boundary(m.C, ps.A, nu);
      emit(tag + "_C_nu", bp.C_nu);
      emit(tag + "_A_nu", bp.A_nu);
      emit(tag + "_M", bp.M);
    }
  }
  std::cout << "wrote " << files << " matrices to " << cfg.output_dir << "\n";
  return 0;
}

int run_solve(const RunConfig& cfg) {
  const Grid g = cfg.grid.make();
  const MaterialSpec& spec = *cfg.material;
  const BoundaryLift lift = cfg.make_lift();
  WillisOperator op(g, spec, lift, cfg.scheme);
  InitialStateReport irep;
  Field v0 = InitialStateBuilder(cfg.initial, lift, spec).field(g, &irep);
  ensure_directory(cfg.output_dir);
  const bool binary = cfg.format == SnapshotFormat::binary;
  int count = 0;
  RunOptions ro;
  ro.T = cfg.T;
  ro.snapshot_every = cfg.snapshot_every;
  ro.keep_snapshots = false;
  ro.warn_only_A0 = cfg.warn_only_A0;
  ro.kernel = cfg.kernel;
  ro.on_snapshot = [&](double t, const Field& v) {
    char name[64];
    std::snprintf(name, sizeof name, "/snapshot_%05d.%s", count++, binary ? "bin" : "txt");
    write_snapshot(cfg.output_dir + name, g, v, t, binary);
  };
  Trajectory tr = run(op, v0, ro);
  write_trace(cfg.output_dir + "/trace.csv", tr);
  std::cout << "steps " << tr.steps << ", dt " << tr.dt << ", max axis speed " << tr.max_speed << "\n"
            << "energy " << tr.energy.front() << " -> " << tr.energy.back() << "\n"
            << "support radius " << tr.radius.front() << " -> " << tr.radius.back() << "\n"
            << "snapshots " << count << " in " << cfg.output_dir << "\n";
  if (tr.wrap_risk) std::cout << "warning: support reached the periodic faces (wrap-around)\n";
  if (!g.periodic()) std::cout << "max corner residual " << tr.max_corner_residual << "\n";
  return 0;
}

int run_convergence(const RunConfig& cfg) {
  if (!cfg.has_manufactured) {
    std::cerr << "FAIL convergence: configuration has no [manufactured] section\n";
    return 2;
  }
  Outcome out;
  ConvergenceOptions co;
  co.scheme = cfg.scheme;
  co.lower = cfg.grid.lower[0];
  co.upper = cfg.grid.upper[0];
  co.mode = cfg.grid.mode;
  co.T = cfg.manufactured_T;
  ConvergenceReport rep = convergence_study(*cfg.material, cfg.manufactured, cfg.manufactured_cells, co);
  std::vector<std::vector<double>> rows;
  for (std::size_t q = 0; q < rep.levels.size(); ++q) {
    const ConvergenceLevel& l = rep.levels[q];
    double o = q > 0 ? rep.order_max[q - 1] : NAN;
    rows.push_back({static_cast<double>(l.cells), l.h, l.dt, l.err_grad, l.err_vel, l.err_disp, l.err_max, o});
    out.info("level " + std::to_string(l.cells), "h " + num(l.h) + ", max error " + num(l.err_max) +
                                                     (q > 0 ? ", observed order " + num(o) : ""));
  }
  ensure_directory(cfg.output_dir);
  write_csv(cfg.output_dir + "/convergence.csv",
            {"cells", "h", "dt", "err_grad", "err_vel", "err_disp", "err_max", "order"}, rows);
  const double need = rep.order - 0.2;
  if (!rep.monotone) out.fail("convergence", "errors are not monotone under refinement");
  else if (rep.min_order() >= need) out.pass("convergence", "min observed order " + num(rep.min_order()) + " >= " + num(need));
  else out.fail("convergence", "min observed order " + num(rep.min_order()) + " < " + num(need));
  out.write_summary(cfg.output_dir, "convergence_summary.txt");
  return out.exit_code();
}

}  // namespace willis::cli
