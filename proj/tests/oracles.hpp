#pragma once
// Independent reference computations for the tests.  Nothing here calls the
// library's assembly or eigen routines.

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "willis/tensors.hpp"

namespace oracle {

using Dense = std::vector<std::vector<double>>;

inline Dense zeros(int n, int m) { return Dense(n, std::vector<double>(m, 0.0)); }

// cyclic Jacobi on a symmetric matrix; returns eigenvalues ascending
inline std::vector<double> jacobi_eigenvalues(Dense a, int sweeps = 100) {
  const int n = static_cast<int>(a.size());
  for (int s = 0; s < sweeps; ++s) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-300) break;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        if (a[p][q] == 0.0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), sn = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - sn * akq;
          a[k][q] = sn * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - sn * aqk;
          a[q][k] = sn * apk + c * aqk;
        }
      }
  }
  std::vector<double> ev(n);
  for (int i = 0; i < n; ++i) ev[i] = a[i][i];
  std::sort(ev.begin(), ev.end());
  return ev;
}

inline double C(const willis::ElasticTensor& c, int i, int j, int k, int l) { return c.c[27 * i + 9 * j + 3 * k + l]; }

// A0 read literally: block row k, block column j is C_j^k, (a, b) = C_{a j b k}
inline Dense A0(const willis::ElasticTensor& c, double rho) {
  Dense m = zeros(15, 15);
  for (int k = 0; k < 3; ++k)
    for (int j = 0; j < 3; ++j)
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) m[3 * k + a][3 * j + b] = C(c, a, j, b, k);
  for (int a = 0; a < 3; ++a) {
    m[9 + a][9 + a] = rho;
    m[12 + a][12 + a] = 1.0;
  }
  return m;
}

inline Dense Ak(const willis::ElasticTensor& c, int k) {
  Dense m = zeros(15, 15);
  for (int r = 0; r < 3; ++r)
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        m[3 * r + a][9 + b] = -C(c, a, k, b, r);
        m[9 + a][3 * r + b] = -C(c, a, r, b, k);
      }
  for (int a = 0; a < 3; ++a) m[12 + a][12 + a] = 1.0;
  return m;
}

// Christoffel speeds sqrt(eig(C_ijkl n_j n_l / rho)), ascending
inline std::array<double, 3> christoffel_speeds(const willis::ElasticTensor& c, double rho, const double n[3]) {
  Dense g = zeros(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k)
      for (int j = 0; j < 3; ++j)
        for (int l = 0; l < 3; ++l) g[i][k] += C(c, i, j, k, l) * n[j] * n[l] / rho;
  std::vector<double> ev = jacobi_eigenvalues(g);
  return {std::sqrt(std::max(ev[0], 0.0)), std::sqrt(std::max(ev[1], 0.0)), std::sqrt(std::max(ev[2], 0.0))};
}

// random admissible C: symmetric 6x6 Voigt matrix shifted to be positive definite
inline willis::ElasticTensor random_elastic(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  willis::Mat6 a;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) a(i, j) = u(rng);
  willis::Mat6 v = a * a.transpose() + 0.5 * willis::Mat6::Identity();
  return willis::ElasticTensor::from_voigt(v);
}

inline willis::CouplingTensor random_symmetric_coupling(std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  std::array<double, 10> p;
  for (double& x : p) x = u(rng);
  return willis::CouplingTensor::totally_symmetric(p);
}

inline double max_abs_diff(const Dense& a, const willis::Mat15& b) {
  double d = 0.0;
  for (int i = 0; i < 15; ++i)
    for (int j = 0; j < 15; ++j) d = std::max(d, std::abs(a[i][j] - b(i, j)));
  return d;
}

inline Dense to_dense(const willis::Mat15& m) {
  Dense d = zeros(15, 15);
  for (int i = 0; i < 15; ++i)
    for (int j = 0; j < 15; ++j) d[i][j] = m(i, j);
  return d;
}

}  // namespace oracle
