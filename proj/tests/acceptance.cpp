// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "willis/assembly.hpp"
#include "willis/verify.hpp"

using namespace willis;

namespace {

struct Result {
  bool pass = false;
  std::string detail;
};

std::string fmt(double x) {
  char b[32];
  std::snprintf(b, sizeof b, "%.3e", x);
  return b;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::array<Mat15, 3> axis_matrices(const ElasticTensor& C) {
  return {assemble_Ak(C, 0), assemble_Ak(C, 1), assemble_Ak(C, 2)};
}

Result exact_symmetry() {
  auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(101);
  double worst = 0.0;
  for (int q = 0; q < 100; ++q) {
    ElasticTensor C = oracle::random_elastic(rng);
    const double rho = 0.1 + std::uniform_real_distribution<double>(0.0, 3.0)(rng);
    Mat15 A0 = assemble_A0(C, rho);
    worst = std::max(worst, (A0 - A0.transpose()).cwiseAbs().maxCoeff());
    for (const Mat15& A : axis_matrices(C)) worst = std::max(worst, (A - A.transpose()).cwiseAbs().maxCoeff());
  }
  const double s = seconds_since(t0);
  return {worst == 0.0 && s < 1.0, "100 draws, max |A - A^T| " + fmt(worst) + ", " + fmt(s) + " s"};
}

Result symmetrization_equivalence() {
  auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> u(-1, 1);
  double gap = 0.0;
  int missed = 0, spurious = 0;
  for (int q = 0; q < 100; ++q) {
    ElasticTensor C = oracle::random_elastic(rng);
    CouplingTensor S = oracle::random_symmetric_coupling(rng);
    try {
      SymmetrizedSystem s = symmetrize(assemble_unsymmetrized(C, 1.3, S), C);
      gap = std::max(gap, (s.A0 - assemble_A0(C, 1.3)).cwiseAbs().maxCoeff());
      for (int k = 0; k < 3; ++k) gap = std::max(gap, (s.A[k] - assemble_Ak(C, k)).cwiseAbs().maxCoeff());
    } catch (const SymmetrizationObstruction&) {
      ++spurious;
    }
    // couplings with some nonzero F: raw entries, or first-pair symmetric only
    CouplingTensor R;
    for (double& x : R.s) x = u(rng);
    if (q % 2) {
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < i; ++j)
          for (int k = 0; k < 3; ++k) R(i, j, k) = R(j, i, k);
    }
    bool any = false;
    for (const Mat3& F : assemble_F(R)) any = any || F.cwiseAbs().maxCoeff() > 0.0;
    bool thrown = false;
    try {
      symmetrize(assemble_unsymmetrized(C, 1.3, R), C);
    } catch (const SymmetrizationObstruction& e) {
      thrown = !e.entries().empty();
    }
    if (any != thrown) ++missed;
  }
  const double s = seconds_since(t0);
  return {gap == 0.0 && missed == 0 && spurious == 0 && s < 1.0,
          "max entry gap " + fmt(gap) + ", obstruction mismatches " + std::to_string(missed) + ", spurious " +
              std::to_string(spurious) + ", " + fmt(s) + " s"};
}

Result kernel_characterization() {
  auto t0 = std::chrono::steady_clock::now();
  double res = 0.0, quad = 0.0;
  bool same = true;
  for (auto [lam, mu] : {std::pair{0.5, 1.0}, std::pair{1.0, 1.0}, std::pair{2.0, 0.5}}) {
    ElasticTensor C = make_isotropic(lam, mu);
    auto A = axis_matrices(C);
    int dim = -1;
    for (int f = 0; f < 6; ++f) {
      Vec3 nu = Vec3::Zero();
      nu(f / 2) = f % 2 ? 1.0 : -1.0;
      NonnegativityReport r = check_maximal_nonnegative(assemble_boundary(C, A, nu));
      res = std::max({res, r.ker_A_nu_residual, r.ker_M_residual, r.ker_A_nu_converse_residual});
      quad = std::max(quad, r.max_abs_quadratic);
      if (dim < 0) dim = r.dim_ker_C_nu;
      same = same && r.dim_ker_C_nu == dim;
    }
  }
  const double s = seconds_since(t0);
  return {res <= 1e-10 && quad <= 1e-10 && same && s < 1.0,
          "membership " + fmt(res) + ", |<A_nu z, z>| " + fmt(quad) + (same ? ", equal dim ker C_nu" : ", dims differ") +
              ", " + fmt(s) + " s"};
}

// constant rho = 1, lambda = 0.5, mu = 1, random totally symmetric S, compact pulse
struct ReductionFixture {
  MaterialSpec spec;
  std::array<Expr, 3> u0, ut0;
  ReductionOptions opt;
  ReductionReport coarse, fine;
  bool ran = false;
};

ReductionFixture& reduction_fixture() {
  static ReductionFixture f = [] {
    std::mt19937_64 rng(404);
    // A0 does not involve S; the scale keeps the coupling moderate
    CouplingTensor S = oracle::random_symmetric_coupling(rng, 0.25);
    ReductionFixture r{MaterialSpec::isotropic(1.0, 0.5, 1.0, MaterialSpec::coupling_constant(S)), {}, {}, {}, {}, {}};
    Expr b = Expr::parse("pos(1 - (x^2 + y^2 + z^2)/0.25)^6");
    r.u0 = {b, b * 0.5, b * -0.25};
    r.ut0 = {0.0, 0.0, 0.0};
    r.opt.T = 0.15;
    r.opt.compare_every = 0;
    return r;
  }();
  if (!f.ran) {
    f.coarse = reduction_check(Grid::cube(-1.2, 1.2, 24, BoundaryMode::periodic), f.spec, f.u0, f.ut0, f.opt);
    f.fine = reduction_check(Grid::cube(-1.2, 1.2, 48, BoundaryMode::periodic), f.spec, f.u0, f.ut0, f.opt);
    f.ran = true;
  }
  return f;
}

Result reduction() {
  ReductionFixture& f = reduction_fixture();
  const double ratio = f.coarse.final_difference() / f.fine.final_difference();
  const bool interior = !f.coarse.willis.wrap_risk && !f.fine.willis.wrap_risk;
  return {ratio >= 3.5 && interior,
          "L2 difference " + fmt(f.coarse.final_difference()) + " (24^3) -> " + fmt(f.fine.final_difference()) +
              " (48^3), ratio " + fmt(ratio) + (interior ? "" : ", pulse reached the faces")};
}

Result propagation() {
  ReductionFixture& f = reduction_fixture();
  bool ok = true;
  std::string d;
  for (const ReductionReport* r : {&f.coarse, &f.fine}) {
    PropagationCheck c = check_propagation(r->willis, r->propagation_speed, r->h);
    ok = ok && c.pass;
    d += (d.empty() ? "" : "; ") + std::string("max rate ") + fmt(c.max_step_rate) + " <= " + fmt(c.step_rate_bound);
  }
  return {ok, "speed " + fmt(f.coarse.propagation_speed) + ", " + d};
}

Result convergence() {
  MaterialSpec spec = MaterialSpec::isotropic(
      1.0, 0.5, 1.0, MaterialSpec::coupling_totally_symmetric({0.1, 0.0, 0.0, 0.0, -0.05, 0.0, 0.08, 0.0, 0.0, 0.0}));
  ManufacturedSolution ms;
  ms.U = {Expr::parse("sin(2*pi*x)*cos(2*pi*y)"), Expr::parse("sin(2*pi*(y + z))"),
          Expr::parse("cos(2*pi*x)*sin(2*pi*z)")};
  ms.omega = 3.0;
  bool ok = true;
  std::string d;
  for (int order : {2, 4}) {
    ConvergenceOptions opt;
    opt.scheme.order = order;
    opt.T = 0.1;
    ConvergenceReport r = convergence_study(spec, ms, {16, 24, 32}, opt);
    const double need = order == 2 ? 1.8 : 3.8;
    ok = ok && r.monotone && r.min_order() >= need;
    d += (d.empty() ? "" : ", ") + std::string("order ") + std::to_string(order) + ": " + fmt(r.min_order());
  }
  return {ok, "observed " + d};
}

Result energy_bound() {
  struct Case {
    const char* name;
    MaterialSpec spec;
  };
  std::array<Expr, 10> constant, varying;
  for (int i = 0; i < 10; ++i) {
    constant[i] = 0.05 * (0.2 * (i % 4) - 0.3);
    varying[i] = Expr::parse("1 + 0.2*sin(2*pi*x)") * (0.05 * (0.2 * (i % 4) - 0.3));
  }
  std::vector<Case> cases{
      {"constant", MaterialSpec::isotropic(1.0, 0.5, 1.0, MaterialSpec::coupling_totally_symmetric(constant))},
      {"varying", MaterialSpec::isotropic(Expr::parse("1 + 0.1*sin(2*pi*x)*(1 + 0.2*t)"),
                                          Expr::parse("0.4 + 0.05*cos(2*pi*y)"), Expr::parse("1 + 0.1*sin(2*pi*z)"),
                                          MaterialSpec::coupling_totally_symmetric(varying))}};
  InitialData d;
  d.u0 = {Expr::parse("0.1*sin(2*pi*x)*cos(2*pi*y)"), Expr::parse("0.1*sin(2*pi*z)"), 0.0};
  d.mu0 = {0.0, Expr::parse("0.2*cos(2*pi*x)"), 0.0};
  bool ok = true;
  std::string detail;
  for (const Case& c : cases) {
    Grid g = Grid::cube(0, 1, 12, BoundaryMode::periodic);
    BoundaryLift lift;
    WillisOperator op(g, c.spec, lift, SchemeConfig{});
    RunOptions ro;
    ro.T = 0.5;
    ro.keep_snapshots = false;
    Trajectory tr = run(op, InitialStateBuilder(d, lift, c.spec).field(g), ro);
    double C = 0.0;
    for (double t : {0.0, 0.25, 0.5}) C = std::max(C, coefficient_bound(g, c.spec, t));
    double worst = 0.0;
    for (std::size_t i = 0; i < tr.times.size(); ++i)
      worst = std::max(worst, tr.energy[i] / (tr.energy.front() * std::exp(1.5 * C * tr.times[i])));
    ok = ok && worst <= 1.0;
    detail += (detail.empty() ? "" : ", ") + std::string(c.name) + " max E/bound " + fmt(worst) + " (C " + fmt(C) + ")";
  }
  return {ok, detail};
}

Result hooke() {
  Grid g = Grid::cube(0, 1, 10, BoundaryMode::periodic);
  MaterialSpec s = MaterialSpec::isotropic(Expr::parse("1 + 0.2*sin(2*pi*x)"), Expr::parse("0.4 + 0.1*cos(2*pi*z)"),
                                           Expr::parse("1 + 0.1*cos(2*pi*y)"), MaterialSpec::coupling_zero());
  BoundaryLift lift;
  WillisOperator op(g, s, lift, SchemeConfig{});
  InitialData d;
  d.u0 = {Expr::parse("0.1*sin(2*pi*x)*cos(2*pi*y)"), Expr::parse("0.05*sin(2*pi*z)"), 0.0};
  d.mu0 = {0.0, 0.0, Expr::parse("0.1*sin(2*pi*(x+y))")};
  RunOptions ro;
  ro.T = 0.1;
  ro.snapshot_every = 1;
  ro.keep_snapshots = false;
  double worst = 0.0;
  int samples = 0;
  ro.on_snapshot = [&](double t, const Field& v) {
    worst = std::max(worst, hooke_recovery_error(g, s, lift, v, t));
    ++samples;
  };
  run(op, InitialStateBuilder(d, lift, s).field(g), ro);
  return {worst <= 1e-12, std::to_string(samples) + " snapshots, max relative deviation " + fmt(worst)};
}

Result compatibility() {
  MaterialSpec spec = MaterialSpec::isotropic(1.0, 0.5, 1.0, MaterialSpec::coupling_zero());
  BoundaryLift lift;
  InitialData good;
  good.u0 = {Expr::parse("(sin(pi*x)*sin(pi*y)*sin(pi*z))^3"), 0.0, 0.0};
  good.mu0 = {0.0, Expr::parse("(sin(pi*x)*sin(pi*y)*sin(pi*z))^2"), 0.0};
  InitialData bad;
  bad.u0 = {Expr::parse("1 + x*y"), 0.0, 0.0};
  const int cells[3] = {16, 24, 32};
  std::array<std::array<double, 2>, 3> r{}, rb{};
  std::array<double, 3> h{};
  for (int q = 0; q < 3; ++q) {
    Grid g = Grid::cube(0, 1, cells[q], BoundaryMode::bounded_box);
    h[q] = g.h_min();
    CompatibilitySequence a = compatibility_sequence(g, 2, spec, lift, InitialStateBuilder(good, lift, spec).field(g), 2);
    CompatibilitySequence b = compatibility_sequence(g, 2, spec, lift, InitialStateBuilder(bad, lift, spec).field(g), 2);
    for (int p = 0; p < 2; ++p) {
      r[q][p] = a.residuals[p];
      rb[q][p] = b.residuals[p];
    }
  }
  bool ok = true;
  std::string d;
  for (int p = 0; p < 2; ++p) {
    const bool exact = r[0][p] <= 1e-12 && r[1][p] <= 1e-12 && r[2][p] <= 1e-12;
    double order = INFINITY;
    for (int q = 0; q + 1 < 3; ++q) order = std::min(order, std::log(r[q][p] / r[q + 1][p]) / std::log(h[q] / h[q + 1]));
    ok = ok && (exact || order >= 1.8);
    d += "p=" + std::to_string(p) + " " + fmt(r[0][p]) + " -> " + fmt(r[2][p]) +
         (exact ? " (exact), " : " (order " + fmt(order) + "), ");
  }
  const double floor = std::min({rb[0][0], rb[1][0], rb[2][0]});
  ok = ok && floor >= 0.1;
  return {ok, d + "incompatible data min residual " + fmt(floor)};
}

Result invariance() {
  Grid g = Grid::cube(-1.2, 1.2, 16, BoundaryMode::periodic);
  std::mt19937_64 rng(1010);
  std::uniform_real_distribution<double> u(-1, 1);
  MaterialSpec s = MaterialSpec::isotropic(1.0, 0.5, 1.0,
                                           MaterialSpec::coupling_constant(oracle::random_symmetric_coupling(rng, 0.2)));
  BoundaryLift lift;
  InitialData d;
  Expr b = Expr::parse("pos(1 - (x^2 + y^2 + z^2)/0.25)^6");
  d.u0 = {b, b * -0.5, 0.0};
  d.mu0 = {0.0, 0.0, b * 0.3};
  WillisOperator op(g, s, lift, SchemeConfig{});
  std::vector<std::pair<double, Field>> ring;
  RunOptions ro;
  ro.T = 0.1;
  ro.snapshot_every = 1;
  ro.keep_snapshots = false;
  ro.on_snapshot = [&](double t, const Field& v) {
    ring.emplace_back(t, v);
    if (ring.size() > 3) ring.erase(ring.begin());
  };
  Trajectory tr = run(op, InitialStateBuilder(d, lift, s).field(g), ro);
  std::array<Field, 3> w{ring[0].second, ring[1].second, ring[2].second};
  const double t = ring[1].first;
  auto mat = [&] {
    Mat3 m;
    for (int i = 0; i < 9; ++i) m(i / 3, i % 3) = u(rng);
    return m;
  };
  ResidualOptions opt;
  double e3 = 0.0;
  for (int q = 0; q < 10; ++q) {
    GalileanTransform x;
    Mat3 a = mat();
    x.A0 = a - a.transpose();
    x.b0 = Vec3(u(rng), u(rng), u(rng));
    x.b1 = Vec3(u(rng), u(rng), u(rng));
    e3 = std::max(e3, galilean_check(g, s, lift, w, t, tr.dt, x, opt).max_pointwise_defect);
  }
  GalileanTransform ext;
  ext.A0 = mat();
  ext.A1 = mat();
  ext.b0 = Vec3(u(rng), u(rng), u(rng));
  const double e4_zero =
      galilean_check(g, s.with_coupling(MaterialSpec::coupling_zero()), lift, w, t, tr.dt, ext, opt).max_pointwise_defect;
  // first-pair symmetric coupling (no cyclic symmetry)
  CouplingTensor pair;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j)
      for (int k = 0; k < 3; ++k) pair(i, j, k) = pair(j, i, k) = 0.2 * u(rng);
  const double e4 = galilean_check(g, s.with_coupling(MaterialSpec::coupling_constant(pair)), lift, w, t, tr.dt, ext, opt)
                        .max_pointwise_defect;
  const double floor = std::max(e3, e4_zero);
  return {e3 <= 1e-10 && e4_zero <= 1e-10 && e4 > 10.0 * floor,
          "skew defect " + fmt(e3) + ", extended S = 0 " + fmt(e4_zero) + ", extended S != 0 gap " + fmt(e4)};
}

Result definiteness_sweep() {
  auto t0 = std::chrono::steady_clock::now();
  std::ifstream in(FIXTURE_DIR "/a0_definiteness_sweep.csv");
  if (!in) return {false, "fixture a0_definiteness_sweep.csv missing"};
  std::string line;
  std::getline(in, line);
  std::vector<std::array<double, 5>> rows;
  std::vector<double> lams, mus;
  while (std::getline(in, line)) {
    std::array<double, 5> r;
    std::stringstream ss(line);
    for (double& v : r) {
      std::string c;
      std::getline(ss, c, ',');
      v = std::stod(c);
    }
    rows.push_back(r);
    if (std::find(lams.begin(), lams.end(), r[0]) == lams.end()) lams.push_back(r[0]);
    if (std::find(mus.begin(), mus.end(), r[1]) == mus.end()) mus.push_back(r[1]);
  }
  std::sort(mus.begin(), mus.end());
  std::vector<A0SweepPoint> sweep = a0_definiteness_sweep(lams, mus);
  if (sweep.size() != rows.size()) return {false, "sweep size differs from the fixture"};
  double dev = 0.0;
  int sign_mismatch = 0, refusal_mismatch = 0;
  Grid g = Grid::cube(0, 1, 8, BoundaryMode::periodic);
  for (std::size_t q = 0; q < rows.size(); ++q) {
    const A0SweepPoint& p = sweep[q];
    std::vector<double> ev = oracle::jacobi_eigenvalues(oracle::A0(make_isotropic(p.lambda, p.mu), 1.0));
    const double scale = std::max(std::abs(ev.front()), std::abs(ev.back()));
    dev = std::max(dev, std::abs(p.min_eigenvalue - ev.front()) / scale);
    if (p.sign != static_cast<int>(rows[q][4]) || p.lambda != rows[q][0] || p.mu != rows[q][1]) ++sign_mismatch;
    MaterialSpec s = MaterialSpec::isotropic(1.0, p.lambda, p.mu, MaterialSpec::coupling_zero());
    BoundaryLift lift;
    bool refused = false;
    try {
      WillisOperator(g, s, lift, SchemeConfig{}).check_A0(0.0);
    } catch (const SingularA0Error&) {
      refused = true;
    }
    if (refused != (p.sign <= 0)) ++refusal_mismatch;
  }
  const double s = seconds_since(t0);
  return {dev <= 1e-10 && sign_mismatch == 0 && refusal_mismatch == 0 && s < 1.0,
          std::to_string(rows.size()) + " points, eigenvalue deviation " + fmt(dev) + ", sign mismatches " +
              std::to_string(sign_mismatch) + ", refusal mismatches " + std::to_string(refusal_mismatch) + ", " +
              fmt(s) + " s"};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Result()>>> criteria{
      {"exact matrix symmetry", exact_symmetry},
      {"symmetrization equivalence", symmetrization_equivalence},
      {"kernel characterization", kernel_characterization},
      {"constant-coefficient reduction", reduction},
      {"finite propagation speed", propagation},
      {"convergence order", convergence},
      {"discrete energy bound", energy_bound},
      {"Hooke recovery", hooke},
      {"compatibility recursion", compatibility},
      {"Galilean invariance", invariance},
      {"A0 definiteness sweep", definiteness_sweep},
  };
  int failed = 0, n = 0;
  for (const auto& [name, check] : criteria) {
    ++n;
    Result r;
    try {
      r = check();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    failed += !r.pass;
    std::printf("%s %2d %s: %s\n", r.pass ? "PASS" : "FAIL", n, name, r.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", n - failed, n);
  return failed ? 1 : 0;
}
