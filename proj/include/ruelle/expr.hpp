/**
 * @file expr.hpp
 * @brief Small arithmetic expression compiler for branches, potentials,
 *        roofs and observables.
 *
 * Variables: x (realized coordinate), y (flow height), tau (roof at x).
 * Constants: pi, e. Functions: sin cos tan exp log ln sqrt abs tanh sinh
 * cosh atan. Operators: + - * / ^ and unary minus.
 */
#pragma once
#include <cctype>
#include <cmath>
#include <string>
#include <vector>

#include "error.hpp"

namespace ruelle {

// Value plus derivative with respect to x.
struct Dual {
  double v = 0, d = 0;
};
inline Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.d + b.d}; }
inline Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.d - b.d}; }
inline Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
inline Dual operator/(Dual a, Dual b) { return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)}; }
inline Dual operator-(Dual a) { return {-a.v, -a.d}; }

class Expr {
 public:
  Expr() = default;
  explicit Expr(const std::string& src) : src_(src) {
    pos_ = 0;
    parse_sum();
    skip_ws();
    if (pos_ != src_.size()) err("unexpected '" + std::string(1, src_[pos_]) + "'");
    int depth = 0, maxd = 0;
    for (const auto& op : code_) {
      depth += stack_effect(op.code);
      maxd = std::max(maxd, depth);
    }
    if (maxd > kStack) err("expression too deep");
  }

  const std::string& source() const { return src_; }
  bool empty() const { return code_.empty(); }
  bool uses(char var) const {
    for (const auto& op : code_)
      if ((var == 'x' && op.code == Op::X) || (var == 'y' && op.code == Op::Y) ||
          (var == 't' && op.code == Op::Tau))
        return true;
    return false;
  }

  double operator()(double x, double y = 0.0, double tau = 0.0) const {
    return run<double>(x, y, tau);
  }
  // Value and d/dx at x.
  Dual dual(double x) const { return run<Dual>(Dual{x, 1.0}, Dual{0, 0}, Dual{0, 0}); }

 private:
  enum class Op { Num, X, Y, Tau, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Tan, Exp, Log, Sqrt, Abs, Tanh, Sinh, Cosh, Atan };
  struct Ins {
    Op code;
    double num = 0;
  };
  static constexpr int kStack = 64;

  static int stack_effect(Op o) {
    switch (o) {
      case Op::Num: case Op::X: case Op::Y: case Op::Tau: return 1;
      case Op::Add: case Op::Sub: case Op::Mul: case Op::Div: case Op::Pow: return -1;
      default: return 0;
    }
  }

  static double fn(Op o, double a) {
    switch (o) {
      case Op::Sin: return std::sin(a);
      case Op::Cos: return std::cos(a);
      case Op::Tan: return std::tan(a);
      case Op::Exp: return std::exp(a);
      case Op::Log: return std::log(a);
      case Op::Sqrt: return std::sqrt(a);
      case Op::Abs: return std::fabs(a);
      case Op::Tanh: return std::tanh(a);
      case Op::Sinh: return std::sinh(a);
      case Op::Cosh: return std::cosh(a);
      case Op::Atan: return std::atan(a);
      default: return a;
    }
  }
  static Dual fn(Op o, Dual a) {
    switch (o) {
      case Op::Sin: return {std::sin(a.v), std::cos(a.v) * a.d};
      case Op::Cos: return {std::cos(a.v), -std::sin(a.v) * a.d};
      case Op::Tan: { double t = std::tan(a.v); return {t, (1 + t * t) * a.d}; }
      case Op::Exp: { double e = std::exp(a.v); return {e, e * a.d}; }
      case Op::Log: return {std::log(a.v), a.d / a.v};
      case Op::Sqrt: { double s = std::sqrt(a.v); return {s, a.d / (2 * s)}; }
      case Op::Abs: return {std::fabs(a.v), a.v < 0 ? -a.d : a.d};
      case Op::Tanh: { double t = std::tanh(a.v); return {t, (1 - t * t) * a.d}; }
      case Op::Sinh: return {std::sinh(a.v), std::cosh(a.v) * a.d};
      case Op::Cosh: return {std::cosh(a.v), std::sinh(a.v) * a.d};
      case Op::Atan: return {std::atan(a.v), a.d / (1 + a.v * a.v)};
      default: return a;
    }
  }
  static double pw(double a, double b) { return std::pow(a, b); }
  static Dual pw(Dual a, Dual b) {
    double v = std::pow(a.v, b.v);
    double d = b.v * std::pow(a.v, b.v - 1) * a.d;
    if (b.d != 0) d += v * std::log(a.v) * b.d;
    return {v, d};
  }
  static double lit(double c, double) { return c; }
  static Dual lit(double c, Dual) { return {c, 0}; }

  template <class T>
  T run(T x, T y, T tau) const {
    T st[kStack];
    int sp = 0;
    for (const auto& in : code_) {
      switch (in.code) {
        case Op::Num: st[sp++] = lit(in.num, x); break;
        case Op::X: st[sp++] = x; break;
        case Op::Y: st[sp++] = y; break;
        case Op::Tau: st[sp++] = tau; break;
        case Op::Add: --sp; st[sp - 1] = st[sp - 1] + st[sp]; break;
        case Op::Sub: --sp; st[sp - 1] = st[sp - 1] - st[sp]; break;
        case Op::Mul: --sp; st[sp - 1] = st[sp - 1] * st[sp]; break;
        case Op::Div: --sp; st[sp - 1] = st[sp - 1] / st[sp]; break;
        case Op::Pow: --sp; st[sp - 1] = pw(st[sp - 1], st[sp]); break;
        case Op::Neg: st[sp - 1] = -st[sp - 1]; break;
        default: st[sp - 1] = fn(in.code, st[sp - 1]); break;
      }
    }
    return st[0];
  }

  [[noreturn]] void err(const std::string& m) const {
    throw ConfigError("expr", m + " in \"" + src_ + "\" at column " + std::to_string(pos_ + 1));
  }
  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) { ++pos_; return true; }
    return false;
  }
  void parse_sum() {
    parse_product();
    for (;;) {
      if (eat('+')) { parse_product(); code_.push_back({Op::Add}); }
      else if (eat('-')) { parse_product(); code_.push_back({Op::Sub}); }
      else return;
    }
  }
  void parse_product() {
    parse_unary();
    for (;;) {
      if (eat('*')) { parse_unary(); code_.push_back({Op::Mul}); }
      else if (eat('/')) { parse_unary(); code_.push_back({Op::Div}); }
      else return;
    }
  }
  void parse_unary() {
    if (eat('-')) { parse_unary(); code_.push_back({Op::Neg}); return; }
    if (eat('+')) { parse_unary(); return; }
    parse_power();
  }
  // Right associative; binds tighter than unary minus on its left.
  void parse_power() {
    parse_atom();
    if (eat('^')) { parse_unary(); code_.push_back({Op::Pow}); }
  }
  void parse_atom() {
    skip_ws();
    if (pos_ >= src_.size()) err("unexpected end");
    char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      parse_sum();
      if (!eat(')')) err("expected ')'");
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      size_t used = 0;
      double v = std::stod(src_.substr(pos_), &used);
      pos_ += used;
      code_.push_back({Op::Num, v});
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      size_t b = pos_;
      while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
      std::string id = src_.substr(b, pos_ - b);
      if (id == "x") { code_.push_back({Op::X}); return; }
      if (id == "y") { code_.push_back({Op::Y}); return; }
      if (id == "tau") { code_.push_back({Op::Tau}); return; }
      if (id == "pi") { code_.push_back({Op::Num, M_PI}); return; }
      if (id == "e") { code_.push_back({Op::Num, M_E}); return; }
      static const std::pair<const char*, Op> fns[] = {
          {"sin", Op::Sin}, {"cos", Op::Cos}, {"tan", Op::Tan}, {"exp", Op::Exp},
          {"log", Op::Log}, {"ln", Op::Log}, {"sqrt", Op::Sqrt}, {"abs", Op::Abs},
          {"tanh", Op::Tanh}, {"sinh", Op::Sinh}, {"cosh", Op::Cosh}, {"atan", Op::Atan}};
      for (const auto& [name, op] : fns) {
        if (id == name) {
          if (!eat('(')) err("expected '(' after " + id);
          parse_sum();
          if (!eat(')')) err("expected ')'");
          code_.push_back({op});
          return;
        }
      }
      pos_ = b;
      err("unknown identifier '" + id + "'");
    }
    err("unexpected '" + std::string(1, c) + "'");
  }

  std::string src_;
  size_t pos_ = 0;
  std::vector<Ins> code_;
};

}  // namespace ruelle
