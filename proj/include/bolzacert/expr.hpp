// Copyright 2026 The bolzacert Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BOLZACERT_EXPR_HPP_
#define BOLZACERT_EXPR_HPP_

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>

#include "bolzacert/errors.hpp"

namespace bolzacert {

/// Which variables an expression may reference.
///
///   RunningCost   t, x1..xn, v1..vn        (the integrand)
///   Drift         t, x1..xn                (one component of g)
///   TerminalCost  x0_1..x0_n, xT_1..xT_n   (the endpoint cost)
enum class Profile { RunningCost, Drift, TerminalCost };

struct Variable {
  enum class Kind : std::uint8_t { Time, State, Velocity, Initial, Terminal };

  Kind kind = Kind::Time;
  int index = 0;  // zero-based component; unused for Time

  static Variable time() { return {Kind::Time, 0}; }
  static Variable state(int i) { return {Kind::State, i}; }
  static Variable velocity(int i) { return {Kind::Velocity, i}; }
  static Variable initial(int i) { return {Kind::Initial, i}; }
  static Variable terminal(int i) { return {Kind::Terminal, i}; }

  friend bool operator==(const Variable&, const Variable&) = default;

  std::string name() const {
    const std::string k = std::to_string(index + 1);
    switch (kind) {
      case Kind::Time:
        return "t";
      case Kind::State:
        return "x" + k;
      case Kind::Velocity:
        return "v" + k;
      case Kind::Initial:
        return "x0_" + k;
      case Kind::Terminal:
        return "xT_" + k;
    }
    return "?";
  }
};

inline bool allowed_in(Variable::Kind kind, Profile profile) {
  using K = Variable::Kind;
  switch (profile) {
    case Profile::RunningCost:
      return kind == K::Time || kind == K::State || kind == K::Velocity;
    case Profile::Drift:
      return kind == K::Time || kind == K::State;
    case Profile::TerminalCost:
      return kind == K::Initial || kind == K::Terminal;
  }
  return false;
}

enum class UnaryOp : std::uint8_t { Neg, Sin, Cos, Exp, Log, Sqrt };
enum class BinaryOp : std::uint8_t { Add, Sub, Mul, Div, Pow };

/// Values bound to the variables during evaluation. Spans that are not needed
/// by the expression's profile may stay empty.
struct Env {
  double t = 0.0;
  std::span<const double> x;
  std::span<const double> v;
  std::span<const double> x0;
  std::span<const double> xT;
};

/// Immutable scalar expression tree. Copies share structure.
class Expr {
 public:
  enum class Kind : std::uint8_t { Constant, Var, Unary, Binary };

  Expr() : Expr(constant(0.0)) {}

  static Expr constant(double value) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Constant;
    n->value = value;
    return Expr(std::move(n));
  }
  static Expr variable(Variable var) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Var;
    n->var = var;
    return Expr(std::move(n));
  }
  static Expr unary(UnaryOp op, Expr arg) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Unary;
    n->uop = op;
    n->lhs = std::move(arg.node_);
    return Expr(std::move(n));
  }
  static Expr binary(BinaryOp op, Expr lhs, Expr rhs) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Binary;
    n->bop = op;
    n->lhs = std::move(lhs.node_);
    n->rhs = std::move(rhs.node_);
    return Expr(std::move(n));
  }

  Kind kind() const { return node_->kind; }
  bool is_constant() const { return node_->kind == Kind::Constant; }
  bool is_constant(double c) const { return is_constant() && node_->value == c; }
  double value() const { return node_->value; }
  const Variable& var() const { return node_->var; }
  UnaryOp unary_op() const { return node_->uop; }
  BinaryOp binary_op() const { return node_->bop; }
  Expr arg() const { return Expr(node_->lhs); }
  Expr lhs() const { return Expr(node_->lhs); }
  Expr rhs() const { return Expr(node_->rhs); }

 private:
  struct Node {
    Kind kind = Kind::Constant;
    double value = 0.0;
    Variable var;
    UnaryOp uop = UnaryOp::Neg;
    BinaryOp bop = BinaryOp::Add;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
  };

  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

// ---------------------------------------------------------------------------
// Structural queries

inline bool equal(const Expr& a, const Expr& b) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Expr::Kind::Constant:
      return a.value() == b.value();
    case Expr::Kind::Var:
      return a.var() == b.var();
    case Expr::Kind::Unary:
      return a.unary_op() == b.unary_op() && equal(a.arg(), b.arg());
    case Expr::Kind::Binary:
      return a.binary_op() == b.binary_op() && equal(a.lhs(), b.lhs()) &&
             equal(a.rhs(), b.rhs());
  }
  return false;
}

inline bool has_variables(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::Constant:
      return false;
    case Expr::Kind::Var:
      return true;
    case Expr::Kind::Unary:
      return has_variables(e.arg());
    case Expr::Kind::Binary:
      return has_variables(e.lhs()) || has_variables(e.rhs());
  }
  return false;
}

inline bool depends_on(const Expr& e, const Variable& v) {
  switch (e.kind()) {
    case Expr::Kind::Constant:
      return false;
    case Expr::Kind::Var:
      return e.var() == v;
    case Expr::Kind::Unary:
      return depends_on(e.arg(), v);
    case Expr::Kind::Binary:
      return depends_on(e.lhs(), v) || depends_on(e.rhs(), v);
  }
  return false;
}

inline std::size_t node_count(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::Constant:
    case Expr::Kind::Var:
      return 1;
    case Expr::Kind::Unary:
      return 1 + node_count(e.arg());
    case Expr::Kind::Binary:
      return 1 + node_count(e.lhs()) + node_count(e.rhs());
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Printing

namespace detail {

inline std::string format_number(double value) {
  char buf[32];
  for (int precision : {15, 17}) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, value);
    if (std::strtod(buf, nullptr) == value) break;
  }
  return buf;
}

inline const char* unary_name(UnaryOp op) {
  switch (op) {
    case UnaryOp::Neg:
      return "-";
    case UnaryOp::Sin:
      return "sin";
    case UnaryOp::Cos:
      return "cos";
    case UnaryOp::Exp:
      return "exp";
    case UnaryOp::Log:
      return "log";
    case UnaryOp::Sqrt:
      return "sqrt";
  }
  return "?";
}

inline char binary_symbol(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add:
      return '+';
    case BinaryOp::Sub:
      return '-';
    case BinaryOp::Mul:
      return '*';
    case BinaryOp::Div:
      return '/';
    case BinaryOp::Pow:
      return '^';
  }
  return '?';
}

// 1 additive, 2 multiplicative, 3 negation, 4 power, 5 atom.
inline int precedence(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::Constant:
    case Expr::Kind::Var:
      return 5;
    case Expr::Kind::Unary:
      return e.unary_op() == UnaryOp::Neg ? 3 : 5;
    case Expr::Kind::Binary:
      switch (e.binary_op()) {
        case BinaryOp::Add:
        case BinaryOp::Sub:
          return 1;
        case BinaryOp::Mul:
        case BinaryOp::Div:
          return 2;
        case BinaryOp::Pow:
          return 4;
      }
  }
  return 5;
}

}  // namespace detail

/// Renders `e` so that parsing the result reproduces the same tree.
inline std::string to_string(const Expr& e) {
  auto wrap = [](const Expr& child, bool parens) {
    return parens ? "(" + to_string(child) + ")" : to_string(child);
  };
  switch (e.kind()) {
    case Expr::Kind::Constant: {
      std::string s = detail::format_number(e.value());
      return (e.value() < 0 || std::signbit(e.value())) ? "(" + s + ")" : s;
    }
    case Expr::Kind::Var:
      return e.var().name();
    case Expr::Kind::Unary:
      if (e.unary_op() == UnaryOp::Neg) {
        return "-" + wrap(e.arg(), detail::precedence(e.arg()) < 3);
      }
      return std::string(detail::unary_name(e.unary_op())) + "(" + to_string(e.arg()) + ")";
    case Expr::Kind::Binary: {
      const int p = detail::precedence(e);
      const bool is_pow = e.binary_op() == BinaryOp::Pow;
      const bool lparen = is_pow ? detail::precedence(e.lhs()) < 5 : detail::precedence(e.lhs()) < p;
      const bool rparen = detail::precedence(e.rhs()) <= p;
      return wrap(e.lhs(), lparen) + detail::binary_symbol(e.binary_op()) + wrap(e.rhs(), rparen);
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// Evaluation

inline double eval(const Expr& e, const Env& env) {
  switch (e.kind()) {
    case Expr::Kind::Constant:
      return e.value();
    case Expr::Kind::Var: {
      const Variable& v = e.var();
      auto pick = [&](std::span<const double> values) {
        if (v.index < 0 || static_cast<std::size_t>(v.index) >= values.size()) {
          throw DomainError("variable " + v.name() + " is not bound in the environment");
        }
        return values[static_cast<std::size_t>(v.index)];
      };
      switch (v.kind) {
        case Variable::Kind::Time:
          return env.t;
        case Variable::Kind::State:
          return pick(env.x);
        case Variable::Kind::Velocity:
          return pick(env.v);
        case Variable::Kind::Initial:
          return pick(env.x0);
        case Variable::Kind::Terminal:
          return pick(env.xT);
      }
      return 0.0;
    }
    case Expr::Kind::Unary: {
      const double a = eval(e.arg(), env);
      switch (e.unary_op()) {
        case UnaryOp::Neg:
          return -a;
        case UnaryOp::Sin:
          return std::sin(a);
        case UnaryOp::Cos:
          return std::cos(a);
        case UnaryOp::Exp:
          return std::exp(a);
        case UnaryOp::Log:
          if (!(a > 0.0)) {
            throw DomainError("log of nonpositive value " + detail::format_number(a) + " in " +
                              to_string(e));
          }
          return std::log(a);
        case UnaryOp::Sqrt:
          if (!(a >= 0.0)) {
            throw DomainError("sqrt of negative value " + detail::format_number(a) + " in " +
                              to_string(e));
          }
          return std::sqrt(a);
      }
      return 0.0;
    }
    case Expr::Kind::Binary: {
      const double a = eval(e.lhs(), env);
      const double b = eval(e.rhs(), env);
      switch (e.binary_op()) {
        case BinaryOp::Add:
          return a + b;
        case BinaryOp::Sub:
          return a - b;
        case BinaryOp::Mul:
          return a * b;
        case BinaryOp::Div:
          if (b == 0.0) throw DomainError("division by zero in " + to_string(e));
          return a / b;
        case BinaryOp::Pow: {
          const bool integral = std::floor(b) == b;
          if (!integral && !(a > 0.0)) {
            throw DomainError("non-integer power of nonpositive base " + detail::format_number(a) +
                              " in " + to_string(e));
          }
          if (a == 0.0 && b < 0.0) throw DomainError("division by zero in " + to_string(e));
          return std::pow(a, b);
        }
      }
      return 0.0;
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Folding constructors. Only identity/annihilator rules plus numeric folding of
// constant operands and merging of constant coefficients; no reassociation.

namespace fold {

inline Expr neg(const Expr& a) {
  if (a.is_constant()) return Expr::constant(-a.value());
  if (a.kind() == Expr::Kind::Unary && a.unary_op() == UnaryOp::Neg) return a.arg();
  return Expr::unary(UnaryOp::Neg, a);
}

inline Expr add(const Expr& a, const Expr& b) {
  if (a.is_constant(0.0)) return b;
  if (b.is_constant(0.0)) return a;
  if (a.is_constant() && b.is_constant()) return Expr::constant(a.value() + b.value());
  return Expr::binary(BinaryOp::Add, a, b);
}

inline Expr sub(const Expr& a, const Expr& b) {
  if (b.is_constant(0.0)) return a;
  if (a.is_constant(0.0)) return neg(b);
  if (a.is_constant() && b.is_constant()) return Expr::constant(a.value() - b.value());
  return Expr::binary(BinaryOp::Sub, a, b);
}

inline bool is_scaled(const Expr& e) {
  return e.kind() == Expr::Kind::Binary && e.binary_op() == BinaryOp::Mul && e.lhs().is_constant();
}

inline Expr mul(const Expr& a, const Expr& b) {
  if (a.is_constant(0.0) || b.is_constant(0.0)) return Expr::constant(0.0);
  if (a.is_constant(1.0)) return b;
  if (b.is_constant(1.0)) return a;
  if (a.is_constant() && b.is_constant()) return Expr::constant(a.value() * b.value());
  if (a.is_constant() && is_scaled(b)) return mul(Expr::constant(a.value() * b.lhs().value()), b.rhs());
  return Expr::binary(BinaryOp::Mul, a, b);
}

inline Expr div(const Expr& a, const Expr& b) {
  if (a.is_constant(0.0)) return Expr::constant(0.0);
  if (b.is_constant(1.0)) return a;
  if (b.is_constant() && b.value() != 0.0) {
    if (a.is_constant()) return Expr::constant(a.value() / b.value());
    if (is_scaled(a)) return mul(Expr::constant(a.lhs().value() / b.value()), a.rhs());
  }
  return Expr::binary(BinaryOp::Div, a, b);
}

inline Expr pow(const Expr& base, double exponent) {
  if (exponent == 1.0) return base;
  if (exponent == 0.0) return Expr::constant(1.0);
  if (base.is_constant() && base.value() > 0.0) {
    return Expr::constant(std::pow(base.value(), exponent));
  }
  return Expr::binary(BinaryOp::Pow, base, Expr::constant(exponent));
}

}  // namespace fold

// ---------------------------------------------------------------------------
// Differentiation

/// Symbolic partial derivative of `e` with respect to `var`.
inline Expr diff(const Expr& e, const Variable& var) {
  switch (e.kind()) {
    case Expr::Kind::Constant:
      return Expr::constant(0.0);
    case Expr::Kind::Var:
      return Expr::constant(e.var() == var ? 1.0 : 0.0);
    case Expr::Kind::Unary: {
      const Expr a = e.arg();
      const Expr da = diff(a, var);
      if (da.is_constant(0.0)) return da;
      switch (e.unary_op()) {
        case UnaryOp::Neg:
          return fold::neg(da);
        case UnaryOp::Sin:
          return fold::mul(Expr::unary(UnaryOp::Cos, a), da);
        case UnaryOp::Cos:
          return fold::mul(fold::neg(Expr::unary(UnaryOp::Sin, a)), da);
        case UnaryOp::Exp:
          return fold::mul(e, da);
        case UnaryOp::Log:
          return fold::div(da, a);
        case UnaryOp::Sqrt:
          return fold::div(da, fold::mul(Expr::constant(2.0), e));
      }
      return Expr::constant(0.0);
    }
    case Expr::Kind::Binary: {
      const Expr a = e.lhs();
      const Expr b = e.rhs();
      if (e.binary_op() == BinaryOp::Pow) {
        // Exponents are constant by construction.
        const double c = b.value();
        const Expr da = diff(a, var);
        return fold::mul(fold::mul(Expr::constant(c), fold::pow(a, c - 1.0)), da);
      }
      const Expr da = diff(a, var);
      const Expr db = diff(b, var);
      switch (e.binary_op()) {
        case BinaryOp::Add:
          return fold::add(da, db);
        case BinaryOp::Sub:
          return fold::sub(da, db);
        case BinaryOp::Mul:
          return fold::add(fold::mul(da, b), fold::mul(a, db));
        case BinaryOp::Div:
          if (db.is_constant(0.0)) return fold::div(da, b);
          if (da.is_constant(0.0)) {
            return fold::neg(fold::div(fold::mul(a, db), fold::pow(b, 2.0)));
          }
          return fold::div(fold::sub(fold::mul(da, b), fold::mul(a, db)), fold::pow(b, 2.0));
        case BinaryOp::Pow:
          break;
      }
      return Expr::constant(0.0);
    }
  }
  return Expr::constant(0.0);
}

// ---------------------------------------------------------------------------
// Parsing
//
//   expr     := term (('+' | '-') term)*
//   term     := unary (('*' | '/') unary)*
//   unary    := '-' unary | power
//   power    := primary ('^' exponent)*
//   exponent := '-' exponent | primary           (must be variable-free)
//   primary  := number | variable | func '(' expr ')' | '(' expr ')'
//   func     := 'sin' | 'cos' | 'exp' | 'log' | 'sqrt'
//   variable := 't' | 'x'k | 'v'k | 'x0_'k | 'xT_'k          (1 <= k <= n)

namespace detail {

class Parser {
 public:
  Parser(std::string_view text, int dimension, Profile profile)
      : text_(text), dimension_(dimension), profile_(profile) {}

  Expr run() {
    if (dimension_ <= 0) throw ValidationError("expression dimension must be positive");
    Expr e = expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }
  [[noreturn]] void fail_at(const std::string& what, std::size_t at) const {
    throw ParseError(what, at);
  }

  void skip_space() {
    while (pos_ < text_.size() &&
           (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' || text_[pos_] == '\r')) {
      ++pos_;
    }
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      fail(pos_ < text_.size() ? "expected '" + std::string(1, c) + "'"
                               : "expected '" + std::string(1, c) + "' before end of input");
    }
  }

  Expr expr() {
    Expr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = Expr::binary(BinaryOp::Add, lhs, term());
      } else if (accept('-')) {
        lhs = Expr::binary(BinaryOp::Sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  Expr term() {
    Expr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = Expr::binary(BinaryOp::Mul, lhs, unary());
      } else if (accept('/')) {
        lhs = Expr::binary(BinaryOp::Div, lhs, unary());
      } else {
        return lhs;
      }
    }
  }

  static Expr negate(const Expr& e) {
    return e.is_constant() ? Expr::constant(-e.value()) : Expr::unary(UnaryOp::Neg, e);
  }

  Expr unary() {
    if (accept('-')) return negate(unary());
    return power();
  }

  Expr power() {
    Expr base = primary();
    while (accept('^')) {
      skip_space();
      const std::size_t at = pos_;
      Expr exponent = exponent_expr();
      if (has_variables(exponent)) fail_at("exponent must be a constant", at);
      if (!exponent.is_constant()) exponent = Expr::constant(eval(exponent, Env{}));
      base = Expr::binary(BinaryOp::Pow, base, exponent);
    }
    return base;
  }

  Expr exponent_expr() {
    if (accept('-')) return negate(exponent_expr());
    return primary();
  }

  Expr primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      expect(')');
      return e;
    }
    if ((c >= '0' && c <= '9') || c == '.') return number();
    if (is_ident_start(c)) return identifier();
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  static bool is_ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  }
  static bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }
  static bool is_digit(char c) { return c >= '0' && c <= '9'; }

  Expr number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
      if (p < text_.size() && is_digit(text_[p])) {
        pos_ = p;
        while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
      }
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (ec != std::errc() || ptr != text_.data() + pos_) fail_at("malformed number", start);
    return Expr::constant(value);
  }

  Expr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
    const std::string_view name = text_.substr(start, pos_ - start);

    for (UnaryOp op : {UnaryOp::Sin, UnaryOp::Cos, UnaryOp::Exp, UnaryOp::Log, UnaryOp::Sqrt}) {
      if (name == unary_name(op)) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == '(') {
          ++pos_;
          Expr arg = expr();
          expect(')');
          return Expr::unary(op, arg);
        }
        fail_at("function `" + std::string(name) + "` requires '('", start);
      }
    }

    Variable var;
    if (!resolve(name, var, start)) {
      fail_at("unknown identifier `" + std::string(name) + "`", start);
    }
    if (!allowed_in(var.kind, profile_)) {
      fail_at("variable `" + std::string(name) + "` is not allowed in a " + profile_name() +
                  " expression",
              start);
    }
    return Expr::variable(var);
  }

  // Returns false for names that are not variables at all; throws for
  // variables whose index is outside 1..n.
  bool resolve(std::string_view name, Variable& out, std::size_t at) const {
    if (name == "t") {
      out = Variable::time();
      return true;
    }
    Variable::Kind kind;
    std::string_view digits;
    if (name.starts_with("x0_")) {
      kind = Variable::Kind::Initial;
      digits = name.substr(3);
    } else if (name.starts_with("xT_")) {
      kind = Variable::Kind::Terminal;
      digits = name.substr(3);
    } else if (name.starts_with("x")) {
      kind = Variable::Kind::State;
      digits = name.substr(1);
    } else if (name.starts_with("v")) {
      kind = Variable::Kind::Velocity;
      digits = name.substr(1);
    } else {
      return false;
    }
    if (digits.empty()) return false;
    for (char c : digits) {
      if (!is_digit(c)) return false;
    }
    long long k = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
    if (ec != std::errc() || k < 1 || k > dimension_) {
      fail_at("variable index out of range in `" + std::string(name) + "` (dimension " +
                  std::to_string(dimension_) + ")",
              at);
    }
    out = Variable{kind, static_cast<int>(k - 1)};
    return true;
  }

  std::string profile_name() const {
    switch (profile_) {
      case Profile::RunningCost:
        return "running-cost";
      case Profile::Drift:
        return "drift";
      case Profile::TerminalCost:
        return "terminal-cost";
    }
    return "?";
  }

  std::string_view text_;
  int dimension_;
  Profile profile_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses `text` into an expression over the variables legal for `profile`
/// with state dimension `dimension`. Throws ParseError with a byte offset.
inline Expr parse(std::string_view text, int dimension, Profile profile) {
  return detail::Parser(text, dimension, profile).run();
}

}  // namespace bolzacert

#endif  // BOLZACERT_EXPR_HPP_
