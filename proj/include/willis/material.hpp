#pragma once

#include <array>
#include <optional>
#include <string>

#include "willis/expr.hpp"
#include "willis/tensors.hpp"

namespace willis {

struct MaterialSample {
  double rho = 1.0;
  double drho_t = 0.0;
  std::array<double, 3> drho{};
  ElasticTensor C;
  ElasticTensor dC_t;
  std::array<ElasticTensor, 3> dC;  // dC[j] = d_j C
  CouplingTensor S;
  CouplingTensor dS_t;
  std::array<CouplingTensor, 3> dS;  // dS[j] = d_j S
};

class DensityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Material fields rho(x,t), C(x,t), S(x,t) as closed-form expressions.
class MaterialSpec {
 public:
  // C from 21 Voigt expressions (upper triangle, row-major: 11 12 ... 66).
  static MaterialSpec from_voigt(Expr rho, const std::array<Expr, 21>& voigt, const std::array<Expr, 27>& S);
  static MaterialSpec isotropic(Expr rho, Expr lambda, Expr mu, const std::array<Expr, 27>& S);
  static MaterialSpec constant(double rho, const ElasticTensor& C, const CouplingTensor& S);

  static std::array<Expr, 27> coupling_zero();
  static std::array<Expr, 27> coupling_totally_symmetric(const std::array<Expr, 10>& p);
  static std::array<Expr, 27> coupling_constant(const CouplingTensor& S);

  // Values and first derivatives; throws DensityError when rho <= 0.
  MaterialSample sample(double x1, double x2, double x3, double t) const;
  // Same fields after differentiating every expression `order` times in t
  // (no positivity check; used by the compatibility recursion).
  MaterialSample sample_time_derivative(int order, double x1, double x2, double x3, double t) const;

  bool uniform() const { return uniform_; }
  bool time_independent() const { return time_independent_; }
  bool coupling_zero_everywhere() const { return coupling_zero_; }

  const Expr& rho() const { return rho_; }
  const Expr& C(int i, int j, int k, int l) const { return C_[27 * i + 9 * j + 3 * k + l]; }
  const Expr& S(int i, int j, int k) const { return S_[9 * i + 3 * j + k]; }

  MaterialSpec with_coupling(const std::array<Expr, 27>& S) const;

 private:
  MaterialSpec(Expr rho, std::array<Expr, 81> C, std::array<Expr, 27> S);

  // a field set with its first derivatives precomputed
  struct Fields {
    Expr rho, rho_t;
    std::array<Expr, 3> rho_x;
    std::array<Expr, 81> C, C_t;
    std::array<std::array<Expr, 81>, 3> C_x;
    std::array<Expr, 27> S, S_t;
    std::array<std::array<Expr, 27>, 3> S_x;
  };
  static Fields make_fields(Expr rho, std::array<Expr, 81> C, std::array<Expr, 27> S);
  static MaterialSample sample_fields(const Fields& f, const Point4& p);

  Expr rho_;
  std::array<Expr, 81> C_;
  std::array<Expr, 27> S_;
  Fields fields_;
  bool uniform_ = true;
  bool time_independent_ = true;
  bool coupling_zero_ = true;
};

struct LiftSample {
  Vec3 u = Vec3::Zero();
  Vec3 ut = Vec3::Zero();
  Vec3 utt = Vec3::Zero();
  Mat3 grad = Mat3::Zero();  // grad(j,i) = d_j ubar_i
  Mat3 grad_t = Mat3::Zero();  // d_t d_j ubar_i, same layout
  std::array<Mat3, 3> hess{Mat3::Zero(), Mat3::Zero(), Mat3::Zero()};  // hess[i](j,k) = d_j d_k ubar_i
};

// Boundary lift ubar(x,t).
class BoundaryLift {
 public:
  BoundaryLift();  // ubar = 0
  explicit BoundaryLift(const std::array<Expr, 3>& u);
  LiftSample sample(double x1, double x2, double x3, double t) const;
  // Sample of d_t^order ubar (and its derivatives).
  LiftSample sample_time_derivative(int order, double x1, double x2, double x3, double t) const;
  bool is_zero() const { return zero_; }
  bool time_independent() const { return time_independent_; }
  const std::array<Expr, 3>& u() const { return u_; }

 private:
  std::array<Expr, 3> u_;
  std::array<Expr, 3> ut_, utt_;
  std::array<std::array<Expr, 3>, 3> dj_, djt_;  // dj_[j][i] = d_j ubar_i
  std::array<std::array<std::array<Expr, 3>, 3>, 3> djk_;  // djk_[i][j][k]
  bool zero_ = true;
  bool time_independent_ = true;
};

// Initial displacement u0 and momentum density mu0.
struct InitialData {
  std::array<Expr, 3> u0;
  std::array<Expr, 3> mu0;
  bool is_zero() const;
};

}  // namespace willis
