#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "willis/linalg.hpp"

namespace willis {

enum class BoundaryMode { periodic, bounded_box };

// Uniform node grid on [lower, lower + extent].  Periodic grids have `cells`
// nodes per axis (the upper face is identified with the lower one); bounded
// boxes have cells + 1 nodes including both faces.
class Grid {
 public:
  Grid(std::array<double, 3> lower, std::array<double, 3> extent, std::array<int, 3> cells, BoundaryMode mode);
  static Grid cube(double lo, double hi, int cells, BoundaryMode mode) {
    return Grid({lo, lo, lo}, {hi - lo, hi - lo, hi - lo}, {cells, cells, cells}, mode);
  }

  BoundaryMode mode() const { return mode_; }
  bool periodic() const { return mode_ == BoundaryMode::periodic; }
  int nodes(int axis) const { return n_[axis]; }
  int cells(int axis) const { return cells_[axis]; }
  double h(int axis) const { return h_[axis]; }
  double h_min() const;
  double cell_volume() const { return h_[0] * h_[1] * h_[2]; }
  double lower(int axis) const { return lower_[axis]; }
  double extent(int axis) const { return extent_[axis]; }
  std::size_t size() const { return static_cast<std::size_t>(n_[0]) * n_[1] * n_[2]; }

  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(n_[0]) * (j + static_cast<std::size_t>(n_[1]) * k);
  }
  double coord(int axis, int i) const { return lower_[axis] + i * h_[axis]; }
  Vec3 point(int i, int j, int k) const { return {coord(0, i), coord(1, j), coord(2, k)}; }
  std::ptrdiff_t stride(int axis) const {
    return axis == 0 ? 1 : (axis == 1 ? n_[0] : static_cast<std::ptrdiff_t>(n_[0]) * n_[1]);
  }
  bool on_boundary(int i, int j, int k) const;

 private:
  std::array<double, 3> lower_, extent_, h_;
  std::array<int, 3> cells_, n_;
  BoundaryMode mode_;
};

// Structure-of-arrays field: component c of node p at data[c * size + p].
class Field {
 public:
  Field() = default;
  Field(const Grid& g, int components) : size_(g.size()), ncomp_(components), data_(size_ * components, 0.0) {}
  Field(std::size_t nodes, int components) : size_(nodes), ncomp_(components), data_(nodes * components, 0.0) {}

  int components() const { return ncomp_; }
  std::size_t size() const { return size_; }
  double* comp(int c) { return data_.data() + c * size_; }
  const double* comp(int c) const { return data_.data() + c * size_; }
  double& at(int c, std::size_t p) { return data_[c * size_ + p]; }
  double at(int c, std::size_t p) const { return data_[c * size_ + p]; }
  std::vector<double>& raw() { return data_; }
  const std::vector<double>& raw() const { return data_; }

  Vec15 state(std::size_t p) const;
  void set_state(std::size_t p, const Vec15& v);

  void set_zero();
  // this += a * x
  void axpy(double a, const Field& x);
  double max_abs() const;
  bool all_finite() const;

 private:
  std::size_t size_ = 0;
  int ncomp_ = 0;
  std::vector<double> data_;
};

// One-dimensional finite-difference stencil per node position along an axis:
// d/dx f at position i = sum_m coef[i][m] * f[i + offset[i][m]].
struct AxisStencil {
  static constexpr int kMaxWidth = 7;
  int width = 0;
  std::vector<std::array<int, kMaxWidth>> offset;
  std::vector<std::array<double, kMaxWidth>> coef;
};

// Central first-derivative stencil of the given order (2 or 4).  Periodic
// grids wrap; bounded boxes switch to one-sided stencils of the same order
// near the faces.
AxisStencil first_derivative_stencil(const Grid& g, int axis, int order);

// Kreiss-Oliger dissipation operator  (-1)^(p+1) h^(2p-1) / 2^(2p) D+^p D-^p
// with 2p = order + 2; zero at nodes where the stencil does not fit.
AxisStencil dissipation_stencil(const Grid& g, int axis, int order);

// Apply a stencil along `axis` to a single component array.
void apply_stencil(const Grid& g, const AxisStencil& st, int axis, const double* f, double* out);

}  // namespace willis
