#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>

#include "willis/solver.hpp"

namespace willis {

void SchemeConfig::validate() const {
  if (order != 2 && order != 4) throw std::invalid_argument("scheme order must be 2 or 4");
  if (!(cfl > 0.0) || cfl > 1.0) throw std::invalid_argument("CFL factor must lie in (0, 1]");
  if (dissipation < 0.0) throw std::invalid_argument("dissipation coefficient must be >= 0");
}

namespace {

std::vector<std::array<std::ptrdiff_t, AxisStencil::kMaxWidth>> flat_offsets(const Grid& g, const AxisStencil& st,
                                                                             int axis) {
  const int n = g.nodes(axis);
  std::vector<std::array<std::ptrdiff_t, AxisStencil::kMaxWidth>> off(n);
  for (int pos = 0; pos < n; ++pos)
    for (int m = 0; m < st.width; ++m) {
      int q = pos + st.offset[pos][m];
      if (q < 0) q += n;
      else if (q >= n) q -= n;
      off[pos][m] = (q - pos) * g.stride(axis);
    }
  return off;
}

}  // namespace

WillisOperator::WillisOperator(const Grid& g, const MaterialSpec& spec, const BoundaryLift& lift, SchemeConfig scheme)
    : grid_(g), spec_(spec), lift_(lift), scheme_(scheme) {
  scheme_.validate();
  // the first-order system exists only for couplings with S_ijk = S_jki
  auto check_coupling = [&](const Vec3& x) {
    CouplingReport r = validate_coupling(spec_.sample(x(0), x(1), x(2), 0.0).S, 1e-12);
    if (r.status == CouplingSymmetry::totally_symmetric) return;
    std::ostringstream os;
    os << "coupling tensor is not totally symmetric at (" << x(0) << ", " << x(1) << ", " << x(2)
       << "): max |S_ijk - S_jik| = " << r.cc1_violation << ", max |S_ijk - S_jki| = " << r.cc2_violation;
    throw std::invalid_argument(os.str());
  };
  if (spec_.uniform()) {
    check_coupling(g.point(0, 0, 0));
  } else {
    int st[3];
    for (int a = 0; a < 3; ++a) st[a] = std::max(1, (g.nodes(a) + 7) / 8);
    for (int k = 0; k < g.nodes(2); k += st[2])
      for (int j = 0; j < g.nodes(1); j += st[1])
        for (int i = 0; i < g.nodes(0); i += st[0]) check_coupling(g.point(i, j, k));
  }
  for (int a = 0; a < 3; ++a) {
    d_[a] = first_derivative_stencil(g, a, scheme_.order);
    d_off_[a] = flat_offsets(g, d_[a], a);
    q_[a] = dissipation_stencil(g, a, scheme_.order);
    q_off_[a] = flat_offsets(g, q_[a], a);
  }
  if (!g.periodic()) {
    // projectors use the coefficients at t = 0; the bounded mode assumes a
    // time-independent stiffness on the boundary
    for (int k = 0; k < g.nodes(2); ++k)
      for (int j = 0; j < g.nodes(1); ++j)
        for (int i = 0; i < g.nodes(0); ++i) {
          if (!g.on_boundary(i, j, k)) continue;
          const int pos[3] = {i, j, k};
          Vec3 x = g.point(i, j, k);
          MaterialSample m = spec_.sample(x(0), x(1), x(2), 0.0);
          for (int a = 0; a < 3; ++a)
            for (int side = 0; side < 2; ++side) {
              if (pos[a] != (side == 0 ? 0 : g.nodes(a) - 1)) continue;
              Vec3 nu = Vec3::Zero();
              nu(a) = side == 0 ? -1.0 : 1.0;
              KernelBasis kb = kernel_basis(assemble_C_nu(m.C, nu));
              projectors_.push_back({g.index(i, j, k), a, side, kb.basis * kb.basis.transpose()});
            }
        }
  }
}

void WillisOperator::build_cache(CoefficientCache& c, double t) const {
  const Grid& g = grid_;
  c.time = t;
  c.uniform = spec_.uniform() && lift_.is_zero();
  const std::size_t n = c.uniform ? 1 : g.size();
  c.inv_rho.assign(n, 0.0);
  c.C.assign(81 * n, 0.0);
  c.D.assign(27 * n, 0.0);
  c.V.assign(9 * n, 0.0);
  c.w.assign(3 * n, 0.0);
  bool any_D = false, any_V = false, any_w = false;
  auto fill = [&](std::size_t slot, const Vec3& x) {
    MaterialSample m = spec_.sample(x(0), x(1), x(2), t);
    c.inv_rho[slot] = 1.0 / m.rho;
    for (int q = 0; q < 81; ++q) c.C[81 * slot + q] = m.C.c[q];
    auto D = assemble_D(m);
    Mat3 V = assemble_velocity_block(m);
    for (int i = 0; i < 3; ++i) {
      for (int q = 0; q < 9; ++q) {
        c.D[27 * slot + 9 * i + q] = D(i, q);
        any_D = any_D || D(i, q) != 0.0;
      }
      for (int k = 0; k < 3; ++k) {
        c.V[9 * slot + 3 * i + k] = V(i, k);
        any_V = any_V || V(i, k) != 0.0;
      }
    }
    if (!lift_.is_zero()) {
      Vec15 w = assemble_w(m, boundary_source_e(lift_.sample(x(0), x(1), x(2), t), m));
      for (int a = 0; a < 3; ++a) {
        c.w[3 * slot + a] = w(9 + a);
        any_w = any_w || w(9 + a) != 0.0;
      }
    }
  };
  if (c.uniform) {
    fill(0, g.point(0, 0, 0));
  } else {
    // sampling is pure, so nodes can be filled concurrently
    std::exception_ptr err;
#pragma omp parallel for collapse(2) schedule(static)
    for (int k = 0; k < g.nodes(2); ++k)
      for (int j = 0; j < g.nodes(1); ++j)
        for (int i = 0; i < g.nodes(0); ++i) {
          try {
            fill(g.index(i, j, k), g.point(i, j, k));
          } catch (...) {
#pragma omp critical
            err = std::current_exception();
          }
        }
    if (err) std::rethrow_exception(err);
  }
  c.has_D = any_D;
  c.has_V = any_V;
  c.has_w = any_w;
}

const CoefficientCache& WillisOperator::coefficients(double t) const {
  const bool frozen = spec_.time_independent() && lift_.time_independent();
  const double key = frozen ? 0.0 : t;
  auto it = cache_.find(key);
  if (it != cache_.end()) return *it->second;
  if (cache_.size() >= 4) cache_.erase(cache_.begin());
  auto c = std::make_unique<CoefficientCache>();
  build_cache(*c, t);
  return *cache_.emplace(key, std::move(c)).first->second;
}

A0Report WillisOperator::check_A0(double t, bool warn_only) const {
  const Grid& g = grid_;
  A0Report worst;
  worst.min_eigenvalue = INFINITY;
  worst.positive_definite = true;
  Vec3 worst_x = Vec3::Zero();
  auto visit = [&](const Vec3& x) {
    MaterialSample m = spec_.sample(x(0), x(1), x(2), t);
    A0Report r = inspect_A0(assemble_A0(m.C, m.rho));
    if (r.min_eigenvalue < worst.min_eigenvalue) {
      worst.min_eigenvalue = r.min_eigenvalue;
      worst.max_abs_eigenvalue = r.max_abs_eigenvalue;
      worst_x = x;
    }
    if (!r.positive_definite) worst.positive_definite = false;
  };
  if (spec_.uniform()) {
    visit(g.point(0, 0, 0));
  } else {
    for (int k = 0; k < g.nodes(2); ++k)
      for (int j = 0; j < g.nodes(1); ++j)
        for (int i = 0; i < g.nodes(0); ++i) visit(g.point(i, j, k));
  }
  if (!worst.positive_definite) {
    std::ostringstream os;
    os << "A0 is not positive definite: min eigenvalue " << worst.min_eigenvalue << " at (" << worst_x(0) << ", "
       << worst_x(1) << ", " << worst_x(2) << ") t = " << t;
    if (!warn_only) throw SingularA0Error(os.str(), worst_x, worst.min_eigenvalue);
    std::cerr << "warning: " << os.str() << "\n";
  }
  return worst;
}

void WillisOperator::enforce_boundary(Field& v) const {
  if (grid_.periodic()) return;
  const Grid& g = grid_;
  for (const FaceProjector& fp : projectors_) {
    const std::size_t p = fp.node;
    const std::ptrdiff_t inward = (fp.side == 0 ? 1 : -1) * g.stride(fp.axis);
    // extrapolate the normal-gradient block from the interior (quadratic)
    for (int b = 0; b < 3; ++b) {
      double* G = v.comp(3 * fp.axis + b);
      G[p] = 3.0 * G[p + inward] - 3.0 * G[p + 2 * inward] + G[p + 3 * inward];
    }
    Vec9 z;
    for (int c = 0; c < 9; ++c) z(c) = v.at(c, p);
    z = fp.P * z;
    for (int c = 0; c < 9; ++c) v.at(c, p) = z(c);
    for (int a = 0; a < 3; ++a) v.at(12 + a, p) = 0.0;
  }
}

double WillisOperator::corner_residual(const Field& v) const {
  if (grid_.periodic()) return 0.0;
  const Grid& g = grid_;
  double r = 0.0;
  for (const FaceProjector& fp : projectors_) {
    std::size_t p = fp.node;
    int i = static_cast<int>(p % g.nodes(0));
    int j = static_cast<int>((p / g.nodes(0)) % g.nodes(1));
    int k = static_cast<int>(p / (static_cast<std::size_t>(g.nodes(0)) * g.nodes(1)));
    int faces = (i == 0 || i == g.nodes(0) - 1) + (j == 0 || j == g.nodes(1) - 1) + (k == 0 || k == g.nodes(2) - 1);
    if (faces < 2) continue;
    Vec9 z;
    for (int c = 0; c < 9; ++c) z(c) = v.at(c, p);
    // distance from ker(C_nu) of this face
    r = std::max(r, (z - fp.P * z).cwiseAbs().maxCoeff());
    for (int a = 0; a < 3; ++a) r = std::max(r, std::abs(v.at(12 + a, p)));
  }
  return r;
}

}  // namespace willis
