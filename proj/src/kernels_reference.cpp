#include <sstream>
#include <vector>

#include <Eigen/Cholesky>

#include "willis/solver.hpp"

namespace willis {

void WillisOperator::apply_reference(const Field& v, double t, Field& out) const {
  const Grid& g = grid_;
  const std::size_t n = g.size();
  std::vector<double> src;
  if (source_) {
    src.assign(3 * n, 0.0);
    source_(t, {src.data(), src.data() + n, src.data() + 2 * n});
  }

  // derivatives component by component
  std::array<Field, 3> dv;
  for (int a = 0; a < 3; ++a) {
    dv[a] = Field(g, 15);
    for (int c = 0; c < 15; ++c) {
      const auto& st = d_[a];
      const double* f = v.comp(c);
      double* o = dv[a].comp(c);
      for (int k = 0; k < g.nodes(2); ++k)
        for (int j = 0; j < g.nodes(1); ++j)
          for (int i = 0; i < g.nodes(0); ++i) {
            const int pos[3] = {i, j, k};
            const std::size_t p = g.index(i, j, k);
            double acc = 0.0;
            for (int m = 0; m < st.width; ++m) acc += st.coef[pos[a]][m] * f[p + d_off_[a][pos[a]][m]];
            o[p] = acc;
          }
    }
  }

  for (int k = 0; k < g.nodes(2); ++k)
    for (int j = 0; j < g.nodes(1); ++j)
      for (int i = 0; i < g.nodes(0); ++i) {
        const std::size_t p = g.index(i, j, k);
        Vec3 x = g.point(i, j, k);
        MaterialSample m = spec_.sample(x(0), x(1), x(2), t);
        PointSystem ps = assemble_point(m, lift_.sample(x(0), x(1), x(2), t));
        Vec15 r = ps.w - ps.B * v.state(p);
        for (int a = 0; a < 3; ++a) r -= ps.A[a] * dv[a].state(p);
        if (!src.empty())
          for (int a = 0; a < 3; ++a) r(9 + a) += src[a * n + p];
        Eigen::LLT<Mat15> llt(ps.A0);
        if (llt.info() != Eigen::Success) {
          A0Report rep = inspect_A0(ps.A0);
          std::ostringstream os;
          os << "singular or indefinite A0 at (" << x(0) << ", " << x(1) << ", " << x(2)
             << "), min eigenvalue " << rep.min_eigenvalue;
          throw SingularA0Error(os.str(), x, rep.min_eigenvalue);
        }
        out.set_state(p, llt.solve(r));
      }

  if (scheme_.dissipation > 0.0) {
    for (int a = 0; a < 3; ++a) {
      const auto& st = q_[a];
      for (int c = 0; c < 15; ++c) {
        const double* f = v.comp(c);
        double* o = out.comp(c);
        for (int k = 0; k < g.nodes(2); ++k)
          for (int j = 0; j < g.nodes(1); ++j)
            for (int i = 0; i < g.nodes(0); ++i) {
              const int pos[3] = {i, j, k};
              const std::size_t p = g.index(i, j, k);
              double acc = 0.0;
              for (int m = 0; m < st.width; ++m) acc += st.coef[pos[a]][m] * f[p + q_off_[a][pos[a]][m]];
              o[p] += scheme_.dissipation * acc;
            }
      }
    }
  }
}

}  // namespace willis
