#include "willis/expr.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>
#include <unordered_map>

namespace willis {

enum class Op { Const, Var, Add, Sub, Mul, Div, Neg, Pow, Sin, Cos, Exp, Sqrt, Pos, Step };

struct ExprNode {
  Op op;
  double value = 0.0;  // Const value, or exponent for Pow
  int var = 0;
  std::shared_ptr<const ExprNode> a, b;
  unsigned deps = 0;  // bitmask over Var
};

namespace {

using NodePtr = std::shared_ptr<const ExprNode>;

NodePtr make_const(double c) {
  auto n = std::make_shared<ExprNode>();
  n->op = Op::Const;
  n->value = c;
  return n;
}

NodePtr make(Op op, NodePtr a, NodePtr b = nullptr, double value = 0.0) {
  auto n = std::make_shared<ExprNode>();
  n->op = op;
  n->value = value;
  n->deps = a->deps | (b ? b->deps : 0u);
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

bool is_c(const NodePtr& n) { return n->op == Op::Const; }
bool is_c(const NodePtr& n, double v) { return n->op == Op::Const && n->value == v; }

double apply_unary(Op op, double x) {
  switch (op) {
    case Op::Neg: return -x;
    case Op::Sin: return std::sin(x);
    case Op::Cos: return std::cos(x);
    case Op::Exp: return std::exp(x);
    case Op::Sqrt: return std::sqrt(x);
    case Op::Pos: return x > 0.0 ? x : 0.0;
    case Op::Step: return x > 0.0 ? 1.0 : 0.0;
    default: return 0.0;
  }
}

double power(double x, double p) {
  if (p == std::floor(p) && std::abs(p) <= 64) {
    int n = static_cast<int>(std::abs(p));
    double r = 1.0, base = x;
    while (n) {
      if (n & 1) r *= base;
      base *= base;
      n >>= 1;
    }
    return p < 0 ? 1.0 / r : r;
  }
  return std::pow(x, p);
}

NodePtr add(NodePtr a, NodePtr b) {
  if (is_c(a) && is_c(b)) return make_const(a->value + b->value);
  if (is_c(a, 0.0)) return b;
  if (is_c(b, 0.0)) return a;
  return make(Op::Add, a, b);
}

NodePtr neg(NodePtr a) {
  if (is_c(a)) return make_const(-a->value);
  if (a->op == Op::Neg) return a->a;
  return make(Op::Neg, a);
}

NodePtr sub(NodePtr a, NodePtr b) {
  if (is_c(a) && is_c(b)) return make_const(a->value - b->value);
  if (is_c(b, 0.0)) return a;
  if (is_c(a, 0.0)) return neg(b);
  return make(Op::Sub, a, b);
}

NodePtr mul(NodePtr a, NodePtr b) {
  if (is_c(a) && is_c(b)) return make_const(a->value * b->value);
  if (is_c(a, 0.0) || is_c(b, 0.0)) return make_const(0.0);
  if (is_c(a, 1.0)) return b;
  if (is_c(b, 1.0)) return a;
  if (is_c(a, -1.0)) return neg(b);
  if (is_c(b, -1.0)) return neg(a);
  return make(Op::Mul, a, b);
}

NodePtr div(NodePtr a, NodePtr b) {
  if (is_c(a) && is_c(b)) return make_const(a->value / b->value);
  if (is_c(a, 0.0)) return make_const(0.0);
  if (is_c(b, 1.0)) return a;
  return make(Op::Div, a, b);
}

NodePtr pw(NodePtr a, double p) {
  if (p == 0.0) return make_const(1.0);
  if (p == 1.0) return a;
  if (is_c(a)) return make_const(power(a->value, p));
  return make(Op::Pow, a, nullptr, p);
}

NodePtr unary(Op op, NodePtr a) {
  if (is_c(a)) return make_const(apply_unary(op, a->value));
  return make(op, a);
}

double eval_node(const ExprNode& n, const Point4& p) {
  switch (n.op) {
    case Op::Const: return n.value;
    case Op::Var: return p[n.var];
    case Op::Add: return eval_node(*n.a, p) + eval_node(*n.b, p);
    case Op::Sub: return eval_node(*n.a, p) - eval_node(*n.b, p);
    case Op::Mul: return eval_node(*n.a, p) * eval_node(*n.b, p);
    case Op::Div: return eval_node(*n.a, p) / eval_node(*n.b, p);
    case Op::Pow: return power(eval_node(*n.a, p), n.value);
    default: return apply_unary(n.op, eval_node(*n.a, p));
  }
}

using Memo = std::unordered_map<const ExprNode*, NodePtr>;

NodePtr diff_node(const NodePtr& n, int v, Memo& memo) {
  if (!(n->deps & (1u << v))) return make_const(0.0);
  if (auto it = memo.find(n.get()); it != memo.end()) return it->second;
  NodePtr r;
  switch (n->op) {
    case Op::Const: r = make_const(0.0); break;
    case Op::Var: r = make_const(n->var == v ? 1.0 : 0.0); break;
    case Op::Add: r = add(diff_node(n->a, v, memo), diff_node(n->b, v, memo)); break;
    case Op::Sub: r = sub(diff_node(n->a, v, memo), diff_node(n->b, v, memo)); break;
    case Op::Mul:
      r = add(mul(diff_node(n->a, v, memo), n->b), mul(n->a, diff_node(n->b, v, memo)));
      break;
    case Op::Div:
      r = sub(div(diff_node(n->a, v, memo), n->b),
              div(mul(n->a, diff_node(n->b, v, memo)), mul(n->b, n->b)));
      break;
    case Op::Neg: r = neg(diff_node(n->a, v, memo)); break;
    case Op::Pow:
      r = mul(mul(make_const(n->value), pw(n->a, n->value - 1.0)), diff_node(n->a, v, memo));
      break;
    case Op::Sin: r = mul(unary(Op::Cos, n->a), diff_node(n->a, v, memo)); break;
    case Op::Cos: r = neg(mul(unary(Op::Sin, n->a), diff_node(n->a, v, memo))); break;
    case Op::Exp: r = mul(n, diff_node(n->a, v, memo)); break;
    case Op::Sqrt: r = div(diff_node(n->a, v, memo), mul(make_const(2.0), n)); break;
    case Op::Pos: r = mul(unary(Op::Step, n->a), diff_node(n->a, v, memo)); break;
    case Op::Step: r = make_const(0.0); break;
  }
  memo.emplace(n.get(), r);
  return r;
}

void print_node(const ExprNode& n, std::ostringstream& os) {
  static const char* names[] = {"x", "y", "z", "t"};
  auto fn = [&](const char* f) {
    os << f << '(';
    print_node(*n.a, os);
    os << ')';
  };
  auto bin = [&](char c) {
    os << '(';
    print_node(*n.a, os);
    os << ' ' << c << ' ';
    print_node(*n.b, os);
    os << ')';
  };
  switch (n.op) {
    case Op::Const: os.precision(17); os << n.value; break;
    case Op::Var: os << names[n.var]; break;
    case Op::Add: bin('+'); break;
    case Op::Sub: bin('-'); break;
    case Op::Mul: bin('*'); break;
    case Op::Div: bin('/'); break;
    case Op::Neg: os << "(-"; print_node(*n.a, os); os << ')'; break;
    case Op::Pow: os << '('; print_node(*n.a, os); os << ")^" << n.value; break;
    case Op::Sin: fn("sin"); break;
    case Op::Cos: fn("cos"); break;
    case Op::Exp: fn("exp"); break;
    case Op::Sqrt: fn("sqrt"); break;
    case Op::Pos: fn("pos"); break;
    case Op::Step: fn("step"); break;
  }
}

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip();
    if (i_ != s_.size()) fail("unexpected '" + std::string(1, s_[i_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(i_, msg); }

  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }

  bool accept(char c) {
    skip();
    if (i_ < s_.size() && s_[i_] == c) {
      ++i_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr l = term();
    for (;;) {
      if (accept('+')) l = add(l, term());
      else if (accept('-')) l = sub(l, term());
      else return l;
    }
  }

  NodePtr term() {
    NodePtr l = unary_();
    for (;;) {
      if (accept('*')) l = mul(l, unary_());
      else if (accept('/')) l = div(l, unary_());
      else return l;
    }
  }

  NodePtr unary_() {
    if (accept('-')) return neg(unary_());
    if (accept('+')) return unary_();
    return power_();
  }

  NodePtr power_() {
    NodePtr base = primary();
    if (accept('^')) {
      std::size_t at = i_;
      NodePtr e = unary_();
      if (!is_c(e)) throw ParseError(at, "exponent must be a constant");
      return pw(base, e->value);
    }
    return base;
  }

  NodePtr primary() {
    skip();
    if (i_ >= s_.size()) fail("unexpected end of expression");
    char c = s_[i_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return name();
    if (accept('(')) {
      NodePtr e = expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    std::size_t start = i_;
    while (i_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[i_])) || s_[i_] == '.')) ++i_;
    if (i_ < s_.size() && (s_[i_] == 'e' || s_[i_] == 'E')) {
      std::size_t save = i_++;
      if (i_ < s_.size() && (s_[i_] == '+' || s_[i_] == '-')) ++i_;
      if (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) {
        while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
      } else {
        i_ = save;
      }
    }
    std::string tok(s_.substr(start, i_ - start));
    try {
      std::size_t used = 0;
      double v = std::stod(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      return make_const(v);
    } catch (const std::exception&) {
      throw ParseError(start, "malformed number '" + tok + "'");
    }
  }

  NodePtr name() {
    std::size_t start = i_;
    while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) ++i_;
    std::string id(s_.substr(start, i_ - start));
    auto var = [](int k) {
      auto n = std::make_shared<ExprNode>();
      n->op = Op::Var;
      n->var = k;
      n->deps = 1u << k;
      return NodePtr(n);
    };
    if (id == "x" || id == "x1") return var(0);
    if (id == "y" || id == "x2") return var(1);
    if (id == "z" || id == "x3") return var(2);
    if (id == "t") return var(3);
    if (id == "pi") return make_const(std::numbers::pi);
    static const std::pair<const char*, Op> funcs[] = {
        {"sin", Op::Sin}, {"cos", Op::Cos}, {"exp", Op::Exp},
        {"sqrt", Op::Sqrt}, {"pos", Op::Pos}, {"step", Op::Step}};
    for (auto& [fname, op] : funcs) {
      if (id == fname) {
        if (!accept('(')) fail("expected '(' after " + id);
        NodePtr arg = expr();
        if (!accept(')')) fail("expected ')'");
        return unary(op, arg);
      }
    }
    throw ParseError(start, "unknown name '" + id + "'");
  }

  std::string_view s_;
  std::size_t i_ = 0;
};

}  // namespace

Expr::Expr() : node_(make_const(0.0)) {}
Expr::Expr(double c) : node_(make_const(c)) {}

Expr Expr::parse(std::string_view text) { return Expr(Parser(text).parse()); }

Expr Expr::variable(Var v) {
  auto n = std::make_shared<ExprNode>();
  n->op = Op::Var;
  n->var = static_cast<int>(v);
  n->deps = 1u << n->var;
  return Expr(NodePtr(n));
}

double Expr::eval(const Point4& p) const { return eval_node(*node_, p); }

Expr Expr::diff(Var v) const {
  Memo memo;
  return Expr(diff_node(node_, static_cast<int>(v), memo));
}

bool Expr::is_constant() const { return node_->op == Op::Const; }
double Expr::constant_value() const { return node_->value; }
bool Expr::depends_on(Var v) const { return node_->deps & (1u << static_cast<int>(v)); }

std::string Expr::str() const {
  std::ostringstream os;
  print_node(*node_, os);
  return os.str();
}

Expr operator+(const Expr& a, const Expr& b) { return Expr(add(a.node_, b.node_)); }
Expr operator-(const Expr& a, const Expr& b) { return Expr(sub(a.node_, b.node_)); }
Expr operator*(const Expr& a, const Expr& b) { return Expr(mul(a.node_, b.node_)); }
Expr operator/(const Expr& a, const Expr& b) { return Expr(div(a.node_, b.node_)); }
Expr operator-(const Expr& a) { return Expr(neg(a.node_)); }
Expr pow(const Expr& a, double p) { return Expr(pw(a.node_, p)); }
Expr sin(const Expr& a) { return Expr(unary(Op::Sin, a.node_)); }
Expr cos(const Expr& a) { return Expr(unary(Op::Cos, a.node_)); }
Expr exp(const Expr& a) { return Expr(unary(Op::Exp, a.node_)); }
Expr sqrt(const Expr& a) { return Expr(unary(Op::Sqrt, a.node_)); }
Expr pos(const Expr& a) { return Expr(unary(Op::Pos, a.node_)); }
Expr step(const Expr& a) { return Expr(unary(Op::Step, a.node_)); }

}  // namespace willis
