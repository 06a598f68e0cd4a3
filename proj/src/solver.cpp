#include "willis/solver.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace willis {

namespace {

struct Rk4Workspace {
  Field k1, k2, k3, k4, u;
  explicit Rk4Workspace(const Grid& g) : k1(g, 15), k2(g, 15), k3(g, 15), k4(g, 15), u(g, 15) {}
};

void combine(Field& out, const Field& v, double a, const Field& k) {
  const std::size_t n = out.raw().size();
  double* o = out.raw().data();
  const double* x = v.raw().data();
  const double* y = k.raw().data();
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) o[i] = x[i] + a * y[i];
}

void rk4(const WillisOperator& op, KernelKind kind, Field& v, double t, double dt, Rk4Workspace& w) {
  op.apply(kind, v, t, w.k1);
  combine(w.u, v, 0.5 * dt, w.k1);
  op.enforce_boundary(w.u);
  op.apply(kind, w.u, t + 0.5 * dt, w.k2);
  combine(w.u, v, 0.5 * dt, w.k2);
  op.enforce_boundary(w.u);
  op.apply(kind, w.u, t + 0.5 * dt, w.k3);
  combine(w.u, v, dt, w.k3);
  op.enforce_boundary(w.u);
  op.apply(kind, w.u, t + dt, w.k4);
  const std::size_t n = v.raw().size();
  double* x = v.raw().data();
  const double *a = w.k1.raw().data(), *b = w.k2.raw().data(), *c = w.k3.raw().data(), *d = w.k4.raw().data();
  const double s = dt / 6.0;
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) x[i] += s * (a[i] + 2.0 * b[i] + 2.0 * c[i] + d[i]);
  op.enforce_boundary(v);
}

bool near_faces(const Grid& g, const Field& v, double thr) {
  for (int k = 0; k < g.nodes(2); ++k)
    for (int j = 0; j < g.nodes(1); ++j)
      for (int i = 0; i < g.nodes(0); ++i) {
        const int pos[3] = {i, j, k};
        bool edge = false;
        for (int a = 0; a < 3; ++a) edge = edge || pos[a] < 2 || pos[a] >= g.nodes(a) - 2;
        if (!edge) continue;
        const std::size_t p = g.index(i, j, k);
        double s = 0.0;
        for (int c = 0; c < 15; ++c) s += v.at(c, p) * v.at(c, p);
        if (std::sqrt(s) > thr) return true;
      }
  return false;
}

std::vector<Vec3> sample_points(const Grid& g, const MaterialSpec& spec) {
  std::vector<Vec3> pts;
  if (spec.uniform()) {
    pts.push_back(g.point(0, 0, 0));
    return pts;
  }
  int stride[3];
  for (int a = 0; a < 3; ++a) stride[a] = std::max(1, (g.nodes(a) + 15) / 16);
  for (int k = 0; k < g.nodes(2); k += stride[2])
    for (int j = 0; j < g.nodes(1); j += stride[1])
      for (int i = 0; i < g.nodes(0); i += stride[0]) pts.push_back(g.point(i, j, k));
  return pts;
}

}  // namespace

void rk4_step(const WillisOperator& op, KernelKind kind, Field& v, double t, double dt) {
  Rk4Workspace w(op.grid());
  rk4(op, kind, v, t, dt, w);
}

double energy(const WillisOperator& op, const Field& v, double t) {
  const Grid& g = op.grid();
  const CoefficientCache& cc = op.coefficients(t);
  const int n0 = g.nodes(0), n1 = g.nodes(1), n2 = g.nodes(2);
  std::vector<double> slab(n2, 0.0);
#pragma omp parallel for schedule(static)
  for (int k = 0; k < n2; ++k) {
    double acc = 0.0;
    for (int j = 0; j < n1; ++j)
      for (int i = 0; i < n0; ++i) {
        const std::size_t p = g.index(i, j, k);
        const std::size_t s = cc.node(p);
        const double* C = &cc.C[81 * s];
        double G[9];
        for (int q = 0; q < 9; ++q) G[q] = v.at(q, p);
        double e = 0.0;
        // <A0 v, v> upper block: sum G_(r,a) C(a,c,b,r) G_(c,b)
        for (int r = 0; r < 3; ++r)
          for (int a = 0; a < 3; ++a) {
            double row = 0.0;
            for (int c = 0; c < 3; ++c)
              for (int b = 0; b < 3; ++b) row += C[27 * a + 9 * c + 3 * b + r] * G[3 * c + b];
            e += G[3 * r + a] * row;
          }
        double rho = 1.0 / cc.inv_rho[s];
        for (int a = 0; a < 3; ++a) {
          double vt = v.at(9 + a, p), u = v.at(12 + a, p);
          e += rho * vt * vt + u * u;
        }
        double wgt = 1.0;
        if (!g.periodic()) {
          if (i == 0 || i == n0 - 1) wgt *= 0.5;
          if (j == 0 || j == n1 - 1) wgt *= 0.5;
          if (k == 0 || k == n2 - 1) wgt *= 0.5;
        }
        acc += wgt * e;
      }
    slab[k] = acc;
  }
  double total = 0.0;
  for (double s : slab) total += s;
  return total * g.cell_volume();
}

double support_radius(const Grid& g, const Field& v, double threshold) {
  double r = 0.0;
  for (int k = 0; k < g.nodes(2); ++k)
    for (int j = 0; j < g.nodes(1); ++j)
      for (int i = 0; i < g.nodes(0); ++i) {
        const std::size_t p = g.index(i, j, k);
        double s = 0.0;
        for (int c = 0; c < v.components(); ++c) s += v.at(c, p) * v.at(c, p);
        if (std::sqrt(s) > threshold) r = std::max(r, g.point(i, j, k).norm());
      }
  return r;
}

Eigen::VectorXd characteristic_speeds(const Mat15& A0, const Mat15& A_nu) {
  Eigen::LLT<Mat15> llt(A0);
  if (llt.info() != Eigen::Success) {
    std::ostringstream os;
    os << "characteristic speeds need a positive definite A0 (min eigenvalue " << inspect_A0(A0).min_eigenvalue
       << ")";
    throw SingularA0Error(os.str(), Vec3::Zero(), inspect_A0(A0).min_eigenvalue);
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat15> es(A_nu, A0, Eigen::EigenvaluesOnly);
  Eigen::VectorXd ev = es.eigenvalues();
  std::sort(ev.data(), ev.data() + ev.size());
  return ev;
}

double max_characteristic_speed(const Grid& g, const MaterialSpec& spec, double t, bool all_directions) {
  std::vector<Vec3> dirs;
  if (all_directions) {
    for (int a = -1; a <= 1; ++a)
      for (int b = -1; b <= 1; ++b)
        for (int c = -1; c <= 1; ++c)
          if (a || b || c) dirs.push_back(Vec3(a, b, c).normalized());
    std::mt19937_64 rng(12345);
    std::normal_distribution<double> n01;
    for (int q = 0; q < 200; ++q) dirs.push_back(Vec3(n01(rng), n01(rng), n01(rng)).normalized());
  }
  double c = 0.0;
  for (const Vec3& x : sample_points(g, spec)) {
    MaterialSample m = spec.sample(x(0), x(1), x(2), t);
    Mat15 A0 = assemble_A0(m.C, m.rho);
    std::array<Mat15, 3> A{assemble_Ak(m.C, 0), assemble_Ak(m.C, 1), assemble_Ak(m.C, 2)};
    if (!all_directions) {
      for (int k = 0; k < 3; ++k) c = std::max(c, characteristic_speeds(A0, A[k]).cwiseAbs().maxCoeff());
      continue;
    }
    for (const Vec3& nu : dirs) {
      Mat15 An = nu(0) * A[0] + nu(1) * A[1] + nu(2) * A[2];
      c = std::max(c, characteristic_speeds(A0, An).cwiseAbs().maxCoeff());
    }
  }
  return c;
}

double cfl_dt(double h_min, double max_speed, double cfl) {
  if (!(max_speed > 0.0)) throw std::invalid_argument("CFL step needs a positive maximum speed");
  return cfl * h_min / (3.0 * max_speed);
}

double coefficient_bound(const Grid& g, const MaterialSpec& spec, double t) {
  double bound = 0.0;
  for (const Vec3& x : sample_points(g, spec)) {
    MaterialSample m = spec.sample(x(0), x(1), x(2), t);
    Mat15 A0 = assemble_A0(m.C, m.rho);
    A0Report r = inspect_A0(A0, 0.0);
    if (!(r.min_eigenvalue > 0.0)) throw SingularA0Error("coefficient bound needs a positive definite A0", x, r.min_eigenvalue);
    double s = spectral_norm(assemble_B(m));
    for (int k = 0; k < 3; ++k) {
      Mat15 dA = assemble_Ak(m.dC[k], k);
      dA.bottomRightCorner<3, 3>().setZero();
      s += spectral_norm(dA);
    }
    Mat15 dA0 = Mat15::Zero();
    dA0.topLeftCorner<9, 9>() = elastic_blocks(m.dC_t).assembled();
    for (int a = 0; a < 3; ++a) dA0(9 + a, 9 + a) = m.drho_t;
    s += spectral_norm(dA0);
    bound = std::max(bound, s / r.min_eigenvalue);
  }
  return bound;
}

Trajectory run(const WillisOperator& op, const Field& v0, const RunOptions& opt) {
  const Grid& g = op.grid();
  op.check_A0(0.0, opt.warn_only_A0);
  Trajectory tr;
  Field v = v0;
  op.enforce_boundary(v);
  tr.max_speed = max_characteristic_speed(g, op.spec(), 0.0);
  double dt = opt.dt > 0.0 ? opt.dt : cfl_dt(g.h_min(), tr.max_speed, op.scheme().cfl);
  int steps = opt.T > 0.0 ? static_cast<int>(std::ceil(opt.T / dt - 1e-12)) : 0;
  if (steps > 0) dt = opt.T / steps;
  tr.dt = dt;
  tr.steps = steps;
  const double thr = opt.support_threshold * v0.max_abs();

  auto trace = [&](double t) {
    tr.times.push_back(t);
    tr.energy.push_back(energy(op, v, t));
    tr.radius.push_back(support_radius(g, v, thr));
    if (g.periodic() && !tr.wrap_risk && v0.max_abs() > 0.0) tr.wrap_risk = near_faces(g, v, thr);
  };
  auto snapshot = [&](double t) {
    tr.snapshot_times.push_back(t);
    if (opt.keep_snapshots) tr.snapshots.push_back(v);
    if (opt.on_snapshot) opt.on_snapshot(t, v);
  };

  trace(0.0);
  snapshot(0.0);
  Rk4Workspace w(g);
  for (int n = 0; n < steps; ++n) {
    const double t = n * dt;
    rk4(op, opt.kernel, v, t, dt, w);
    const double tn = (n + 1) * dt;
    if (!v.all_finite()) {
      std::ostringstream os;
      os << "instability: non-finite state after step " << n + 1 << " (t = " << tn << ", dt = " << dt
         << "); last energy " << tr.energy.back();
      throw InstabilityError(os.str(), n + 1, tn);
    }
    trace(tn);
    if (!g.periodic()) tr.max_corner_residual = std::max(tr.max_corner_residual, op.corner_residual(v));
    bool last = n + 1 == steps;
    if (last || (opt.snapshot_every > 0 && (n + 1) % opt.snapshot_every == 0)) snapshot(tn);
  }
  tr.final_state = std::move(v);
  return tr;
}

GrowthFit fit_growth(const std::vector<double>& t, const std::vector<double>& E) {
  GrowthFit f;
  if (E.empty() || !(E[0] > 0.0)) return f;
  double sty = 0.0, stt = 0.0;
  bool any = false;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(t[i] > 0.0) || !(E[i] > 0.0)) continue;
    double y = std::log(E[i] / E[0]);
    sty += t[i] * y;
    stt += t[i] * t[i];
    double r = y / t[i];
    f.max_rate = any ? std::max(f.max_rate, r) : r;
    any = true;
  }
  if (stt > 0.0) f.fitted_rate = sty / stt;
  return f;
}

}  // namespace willis
