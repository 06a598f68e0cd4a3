#include <vector>

#include "willis/solver.hpp"

namespace willis {

void WillisOperator::apply(const Field& v, double t, Field& out) const {
  const Grid& g = grid_;
  const CoefficientCache& cc = coefficients(t);
  const std::size_t n = g.size();
  const int n0 = g.nodes(0), n1 = g.nodes(1), n2 = g.nodes(2);
  const int width = d_[0].width;
  const int qwidth = q_[0].width;
  const double sigma = scheme_.dissipation;

  std::vector<double> src;
  if (source_) {
    src.assign(3 * n, 0.0);
    source_(t, {src.data(), src.data() + n, src.data() + 2 * n});
  }
  const double* srcp = src.empty() ? nullptr : src.data();

  const double* vc[15];
  double* oc[15];
  for (int c = 0; c < 15; ++c) {
    vc[c] = v.comp(c);
    oc[c] = out.comp(c);
  }

#pragma omp parallel for collapse(2) schedule(static)
  for (int k = 0; k < n2; ++k)
    for (int j = 0; j < n1; ++j) {
      for (int i = 0; i < n0; ++i) {
        const std::size_t p = g.index(i, j, k);
        const int pos[3] = {i, j, k};
        // d[a][c] = D_a v_c at p
        double d[3][15];
        for (int a = 0; a < 3; ++a) {
          const auto& off = d_off_[a][pos[a]];
          const auto& cf = d_[a].coef[pos[a]];
          for (int c = 0; c < 15; ++c) {
            const double* f = vc[c] + p;
            double acc = 0.0;
            for (int m = 0; m < width; ++m) acc += cf[m] * f[off[m]];
            d[a][c] = acc;
          }
        }
        const std::size_t s = cc.node(p);
        const double* C = &cc.C[81 * s];

        // gradient blocks: d_t G_(k,b) = D_k v_t,b
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b) oc[3 * a + b][p] = d[a][9 + b];

        // momentum rows
        for (int ii = 0; ii < 3; ++ii) {
          double m = 0.0;
          const double* Ci = C + 27 * ii;
          for (int c = 0; c < 3; ++c)
            for (int b = 0; b < 3; ++b) {
              const double* Cicb = Ci + 9 * c + 3 * b;  // C(ii, c, b, kk) for kk = 0..2
              m += Cicb[0] * d[0][3 * c + b] + Cicb[1] * d[1][3 * c + b] + Cicb[2] * d[2][3 * c + b];
            }
          if (cc.has_D) {
            const double* D = &cc.D[27 * s + 9 * ii];
            for (int q = 0; q < 9; ++q) m -= D[q] * vc[q][p];
          }
          if (cc.has_V) {
            const double* V = &cc.V[9 * s + 3 * ii];
            m -= V[0] * vc[9][p] + V[1] * vc[10][p] + V[2] * vc[11][p];
          }
          if (cc.has_w) m += cc.w[3 * s + ii];
          if (srcp) m += srcp[ii * n + p];
          oc[9 + ii][p] = m * cc.inv_rho[s];
        }

        // auxiliary displacement rows
        for (int a = 0; a < 3; ++a)
          oc[12 + a][p] = -(d[0][12 + a] + d[1][12 + a] + d[2][12 + a]) + vc[a][p] + vc[3 + a][p] + vc[6 + a][p] +
                          vc[9 + a][p];

        if (sigma > 0.0) {
          for (int a = 0; a < 3; ++a) {
            const auto& off = q_off_[a][pos[a]];
            const auto& cf = q_[a].coef[pos[a]];
            for (int c = 0; c < 15; ++c) {
              const double* f = vc[c] + p;
              double acc = 0.0;
              for (int m = 0; m < qwidth; ++m) acc += cf[m] * f[off[m]];
              oc[c][p] += sigma * acc;
            }
          }
        }
      }
    }
}

}  // namespace willis
