#include "cli/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace sublin::cli {

ExprSyntaxError::ExprSyntaxError(const std::string& message, int column)
    : std::invalid_argument("column " + std::to_string(column) + ": " + message), column_(column) {}

ExprDomainError::ExprDomainError(const std::string& message, int begin, int end)
    : std::domain_error("columns " + std::to_string(begin) + "-" + std::to_string(end - 1) + ": " + message),
      begin_(begin),
      end_(end) {}

Expr Expr::number(double v) {
  Expr e;
  e.kind = Kind::number;
  e.value = v;
  return e;
}

Expr Expr::variable(std::string name, int slot) {
  Expr e;
  e.kind = Kind::variable;
  e.name = std::move(name);
  e.slot = slot;
  return e;
}

Expr Expr::unary(Expr operand) {
  Expr e;
  e.kind = Kind::negate;
  e.args.push_back(std::move(operand));
  return e;
}

Expr Expr::binary(Kind kind, Expr lhs, Expr rhs) {
  Expr e;
  e.kind = kind;
  e.args.push_back(std::move(lhs));
  e.args.push_back(std::move(rhs));
  return e;
}

Expr Expr::call(Func f, std::vector<Expr> args) {
  Expr e;
  e.kind = Kind::call;
  e.func = f;
  e.args = std::move(args);
  return e;
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Expr::Kind::number: return a.value == b.value;
    case Expr::Kind::variable: return a.name == b.name && a.slot == b.slot;
    case Expr::Kind::call:
      if (a.func != b.func) return false;
      break;
    default: break;
  }
  return a.args == b.args;
}

std::string function_name(Func f) {
  switch (f) {
    case Func::exp: return "exp";
    case Func::log: return "log";
    case Func::sqrt: return "sqrt";
    case Func::abs: return "abs";
    case Func::sin: return "sin";
    case Func::cos: return "cos";
    case Func::min: return "min";
    case Func::max: return "max";
    case Func::pow: return "pow";
  }
  return "?";
}

int function_arity(Func f) { return (f == Func::min || f == Func::max || f == Func::pow) ? 2 : 1; }

namespace {

double checked_pow(const Expr& e, double base, double exponent) {
  if (base < 0 && exponent != std::floor(exponent))
    throw ExprDomainError("negative base with non-integer exponent", e.begin, e.end);
  if (base == 0 && exponent < 0) throw ExprDomainError("zero raised to a negative power", e.begin, e.end);
  return std::pow(base, exponent);
}

}  // namespace

double Expr::evaluate(std::span<const double> env) const {
  switch (kind) {
    case Kind::number: return value;
    case Kind::variable: return env[static_cast<std::size_t>(slot)];
    case Kind::negate: return -args[0].evaluate(env);
    case Kind::add: return args[0].evaluate(env) + args[1].evaluate(env);
    case Kind::sub: return args[0].evaluate(env) - args[1].evaluate(env);
    case Kind::mul: return args[0].evaluate(env) * args[1].evaluate(env);
    case Kind::div: {
      const double d = args[1].evaluate(env);
      if (d == 0.0) throw ExprDomainError("division by zero", begin, end);
      return args[0].evaluate(env) / d;
    }
    case Kind::power: return checked_pow(*this, args[0].evaluate(env), args[1].evaluate(env));
    case Kind::call: {
      const double a = args[0].evaluate(env);
      switch (func) {
        case Func::exp: return std::exp(a);
        case Func::log:
          if (!(a > 0)) throw ExprDomainError("log of a non-positive value", begin, end);
          return std::log(a);
        case Func::sqrt:
          if (a < 0) throw ExprDomainError("sqrt of a negative value", begin, end);
          return std::sqrt(a);
        case Func::abs: return std::abs(a);
        case Func::sin: return std::sin(a);
        case Func::cos: return std::cos(a);
        case Func::min: return std::min(a, args[1].evaluate(env));
        case Func::max: return std::max(a, args[1].evaluate(env));
        case Func::pow: return checked_pow(*this, a, args[1].evaluate(env));
      }
    }
  }
  return 0.0;
}

bool Expr::uses(int s) const {
  if (kind == Kind::variable) return slot == s;
  for (const Expr& a : args)
    if (a.uses(s)) return true;
  return false;
}

namespace {

class Parser {
 public:
  Parser(const std::string& text, const std::vector<std::string>& variables) : text_(text), vars_(variables) {}

  Expr run() {
    skip();
    if (pos_ >= text_.size()) fail("empty expression");
    Expr e = expr();
    skip();
    if (pos_ < text_.size()) fail(std::string("unexpected '") + text_[pos_] + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ExprSyntaxError(msg, static_cast<int>(pos_) + 1); }

  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  int col() const { return static_cast<int>(pos_) + 1; }

  Expr finish(Expr e, int begin) const {
    e.begin = begin;
    e.end = col();
    return e;
  }

  Expr expr() {
    skip();
    const int begin = col();
    Expr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = finish(Expr::binary(Expr::Kind::add, std::move(lhs), term()), begin);
      } else if (accept('-')) {
        lhs = finish(Expr::binary(Expr::Kind::sub, std::move(lhs), term()), begin);
      } else {
        return lhs;
      }
    }
  }

  Expr term() {
    skip();
    const int begin = col();
    Expr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = finish(Expr::binary(Expr::Kind::mul, std::move(lhs), unary()), begin);
      } else if (accept('/')) {
        lhs = finish(Expr::binary(Expr::Kind::div, std::move(lhs), unary()), begin);
      } else {
        return lhs;
      }
    }
  }

  Expr unary() {
    skip();
    const int begin = col();
    if (accept('-')) return finish(Expr::unary(unary()), begin);
    return power();
  }

  Expr power() {
    skip();
    const int begin = col();
    Expr base = primary();
    if (accept('^')) return finish(Expr::binary(Expr::Kind::power, std::move(base), unary()), begin);
    return base;
  }

  Expr primary() {
    skip();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    const int begin = col();
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return finish(number(), begin);
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    if (accept('(')) {
      Expr inner = expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    fail(std::string("unexpected '") + c + "'");
  }

  Expr number() {
    const char* start = text_.c_str() + pos_;
    char* stop = nullptr;
    const double v = std::strtod(start, &stop);
    if (stop == start) fail("malformed number");
    pos_ += static_cast<std::size_t>(stop - start);
    if (!std::isfinite(v)) fail("number out of range");
    return Expr::number(v);
  }

  Expr identifier() {
    const int begin = col();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
    const std::string name = text_.substr(start, pos_ - start);
    skip();
    if (pos_ < text_.size() && text_[pos_] == '(') {
      static const Func all[] = {Func::exp, Func::log, Func::sqrt, Func::abs, Func::sin,
                                 Func::cos, Func::min, Func::max, Func::pow};
      const Func* found = nullptr;
      for (const Func& f : all)
        if (function_name(f) == name) found = &f;
      if (!found) throw ExprSyntaxError("unknown function '" + name + "'", begin);
      ++pos_;
      std::vector<Expr> args;
      args.push_back(expr());
      while (accept(',')) args.push_back(expr());
      if (!accept(')')) fail("expected ')' or ','");
      if (static_cast<int>(args.size()) != function_arity(*found)) {
        std::ostringstream msg;
        msg << function_name(*found) << " takes " << function_arity(*found) << " argument(s), got " << args.size();
        throw ExprSyntaxError(msg.str(), begin);
      }
      return finish(Expr::call(*found, std::move(args)), begin);
    }
    for (std::size_t i = 0; i < vars_.size(); ++i)
      if (vars_[i] == name) return finish(Expr::variable(name, static_cast<int>(i)), begin);
    throw ExprSyntaxError("unknown identifier '" + name + "'", begin);
  }

  const std::string& text_;
  const std::vector<std::string>& vars_;
  std::size_t pos_ = 0;
};

// Binding strength used by the printer.
int precedence(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::add:
    case Expr::Kind::sub: return 1;
    case Expr::Kind::mul:
    case Expr::Kind::div: return 2;
    case Expr::Kind::negate: return 3;
    case Expr::Kind::power: return 4;
    default: return 5;
  }
}

std::string wrap(const Expr& e, bool parens) {
  const std::string s = print_expr(e);
  return parens ? "(" + s + ")" : s;
}

}  // namespace

Expr parse_expr(const std::string& text, const std::vector<std::string>& variables) {
  return Parser(text, variables).run();
}

std::string print_expr(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::number: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", e.value);
      return e.value < 0 ? "(" + std::string(buf) + ")" : std::string(buf);
    }
    case Expr::Kind::variable: return e.name;
    case Expr::Kind::negate: return "-" + wrap(e.args[0], precedence(e.args[0]) < 3);
    case Expr::Kind::power:
      return wrap(e.args[0], precedence(e.args[0]) < 5) + "^" + wrap(e.args[1], precedence(e.args[1]) < 3);
    case Expr::Kind::call: {
      std::string s = function_name(e.func) + "(";
      for (std::size_t i = 0; i < e.args.size(); ++i) s += (i ? ", " : "") + print_expr(e.args[i]);
      return s + ")";
    }
    default: {
      const int p = precedence(e);
      const char* op = e.kind == Expr::Kind::add ? " + " : e.kind == Expr::Kind::sub ? " - "
                     : e.kind == Expr::Kind::mul ? "*" : "/";
      return wrap(e.args[0], precedence(e.args[0]) < p) + op + wrap(e.args[1], precedence(e.args[1]) <= p);
    }
  }
}

}  // namespace sublin::cli
