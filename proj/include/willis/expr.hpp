#pragma once

// Closed-form scalar expressions in (x1, x2, x3, t) with exact symbolic
// differentiation.  Grammar:
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('+' | '-') unary | power
//   power   := primary ('^' unary)?          exponent must be constant
//   primary := number | name | func '(' expr ')' | '(' expr ')'
//
// names: x y z (aliases x1 x2 x3), t, pi
// funcs: sin cos exp sqrt pos step
//
// pos(a) = max(a, 0) and step(a) = 1 if a > 0 else 0; pos is used for
// compactly supported pulses such as pos(1 - r^2)^6.

#include <array>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

namespace willis {

enum class Var { x1 = 0, x2 = 1, x3 = 2, t = 3 };

// (x1, x2, x3, t)
using Point4 = std::array<double, 4>;

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t pos, const std::string& msg)
      : std::runtime_error("position " + std::to_string(pos) + ": " + msg), pos_(pos) {}
  std::size_t position() const { return pos_; }

 private:
  std::size_t pos_;
};

struct ExprNode;

class Expr {
 public:
  Expr();  // zero
  Expr(double c);  // NOLINT: implicit conversion from constants is convenient

  static Expr parse(std::string_view text);
  static Expr variable(Var v);

  double eval(const Point4& p) const;
  Expr diff(Var v) const;

  bool is_constant() const;
  // Constant value; only meaningful when is_constant().
  double constant_value() const;
  bool is_zero() const { return is_constant() && constant_value() == 0.0; }
  bool depends_on(Var v) const;
  std::string str() const;

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);
  friend Expr pow(const Expr& a, double p);
  friend Expr sin(const Expr& a);
  friend Expr cos(const Expr& a);
  friend Expr exp(const Expr& a);
  friend Expr sqrt(const Expr& a);
  friend Expr pos(const Expr& a);
  friend Expr step(const Expr& a);

  Expr& operator+=(const Expr& b) { return *this = *this + b; }
  Expr& operator*=(const Expr& b) { return *this = *this * b; }

 private:
  explicit Expr(std::shared_ptr<const ExprNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const ExprNode> node_;
};

}  // namespace willis
