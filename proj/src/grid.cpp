#include "willis/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace willis {

Grid::Grid(std::array<double, 3> lower, std::array<double, 3> extent, std::array<int, 3> cells, BoundaryMode mode)
    : lower_(lower), extent_(extent), cells_(cells), mode_(mode) {
  for (int a = 0; a < 3; ++a) {
    if (cells[a] < 8) throw std::invalid_argument("grid needs at least 8 cells per axis");
    if (!(extent[a] > 0.0)) throw std::invalid_argument("grid extent must be positive");
    h_[a] = extent[a] / cells[a];
    n_[a] = mode == BoundaryMode::periodic ? cells[a] : cells[a] + 1;
  }
}

double Grid::h_min() const { return std::min({h_[0], h_[1], h_[2]}); }

bool Grid::on_boundary(int i, int j, int k) const {
  if (periodic()) return false;
  return i == 0 || j == 0 || k == 0 || i == n_[0] - 1 || j == n_[1] - 1 || k == n_[2] - 1;
}

Vec15 Field::state(std::size_t p) const {
  Vec15 v;
  for (int c = 0; c < 15; ++c) v(c) = data_[c * size_ + p];
  return v;
}

void Field::set_state(std::size_t p, const Vec15& v) {
  for (int c = 0; c < 15; ++c) data_[c * size_ + p] = v(c);
}

void Field::set_zero() { std::fill(data_.begin(), data_.end(), 0.0); }

void Field::axpy(double a, const Field& x) {
  const std::size_t n = data_.size();
  const double* xs = x.data_.data();
  double* ys = data_.data();
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) ys[i] += a * xs[i];
}

double Field::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

bool Field::all_finite() const {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

namespace {

void set(AxisStencil& s, int i, std::initializer_list<int> offs, std::initializer_list<double> cs, double scale) {
  int m = 0;
  auto c = cs.begin();
  for (int o : offs) {
    s.offset[i][m] = o;
    s.coef[i][m] = *c++ * scale;
    ++m;
  }
}

}  // namespace

AxisStencil first_derivative_stencil(const Grid& g, int axis, int order) {
  if (order != 2 && order != 4) throw std::invalid_argument("spatial order must be 2 or 4");
  const int n = g.nodes(axis);
  const double h = g.h(axis);
  AxisStencil s;
  s.width = order + 1;
  s.offset.assign(n, {});
  s.coef.assign(n, {});
  for (int i = 0; i < n; ++i) {
    if (order == 2) {
      if (g.periodic() || (i > 0 && i < n - 1)) set(s, i, {-1, 0, 1}, {-0.5, 0.0, 0.5}, 1.0 / h);
      else if (i == 0) set(s, i, {0, 1, 2}, {-1.5, 2.0, -0.5}, 1.0 / h);
      else set(s, i, {0, -1, -2}, {1.5, -2.0, 0.5}, 1.0 / h);
    } else {
      const double k = 1.0 / (12.0 * h);
      if (g.periodic() || (i > 1 && i < n - 2)) set(s, i, {-2, -1, 0, 1, 2}, {1.0, -8.0, 0.0, 8.0, -1.0}, k);
      else if (i == 0) set(s, i, {0, 1, 2, 3, 4}, {-25.0, 48.0, -36.0, 16.0, -3.0}, k);
      else if (i == 1) set(s, i, {-1, 0, 1, 2, 3}, {-3.0, -10.0, 18.0, -6.0, 1.0}, k);
      else if (i == n - 1) set(s, i, {0, -1, -2, -3, -4}, {25.0, -48.0, 36.0, -16.0, 3.0}, k);
      else set(s, i, {1, 0, -1, -2, -3}, {3.0, 10.0, -18.0, 6.0, -1.0}, k);
    }
  }
  return s;
}

AxisStencil dissipation_stencil(const Grid& g, int axis, int order) {
  const int n = g.nodes(axis);
  const double h = g.h(axis);
  AxisStencil s;
  s.offset.assign(n, {});
  s.coef.assign(n, {});
  if (order == 2) {
    s.width = 5;
    for (int i = 0; i < n; ++i)
      if (g.periodic() || (i >= 2 && i < n - 2))
        set(s, i, {-2, -1, 0, 1, 2}, {1.0, -4.0, 6.0, -4.0, 1.0}, -1.0 / (16.0 * h));
  } else {
    s.width = 7;
    for (int i = 0; i < n; ++i)
      if (g.periodic() || (i >= 3 && i < n - 3))
        set(s, i, {-3, -2, -1, 0, 1, 2, 3}, {1.0, -6.0, 15.0, -20.0, 15.0, -6.0, 1.0}, 1.0 / (64.0 * h));
  }
  return s;
}

void apply_stencil(const Grid& g, const AxisStencil& st, int axis, const double* f, double* out) {
  const int n0 = g.nodes(0), n1 = g.nodes(1), n2 = g.nodes(2);
  const int na = g.nodes(axis);
  const std::ptrdiff_t sa = g.stride(axis);
#pragma omp parallel for collapse(2) schedule(static)
  for (int k = 0; k < n2; ++k)
    for (int j = 0; j < n1; ++j)
      for (int i = 0; i < n0; ++i) {
        const int pos = axis == 0 ? i : (axis == 1 ? j : k);
        const std::size_t p = g.index(i, j, k);
        const auto& off = st.offset[pos];
        const auto& c = st.coef[pos];
        double acc = 0.0;
        for (int m = 0; m < st.width; ++m) {
          int q = pos + off[m];
          if (q < 0) q += na;
          else if (q >= na) q -= na;
          acc += c[m] * f[p + (q - pos) * sa];
        }
        out[p] = acc;
      }
}

}  // namespace willis
