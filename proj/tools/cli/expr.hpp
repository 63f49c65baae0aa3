#pragma once

// Arithmetic expressions for coefficient fields, densities, masks and
// nonlinearities.
//
//   expr  := term (('+' | '-') term)*
//   term  := unary (('*' | '/') unary)*
//   unary := '-' unary | power
//   power := primary ('^' unary)?
//   primary := number | identifier | identifier '(' expr (',' expr)* ')' | '(' expr ')'

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sublin::cli {

/// Syntax and binding errors; column is 1-based.
class ExprSyntaxError : public std::invalid_argument {
 public:
  ExprSyntaxError(const std::string& message, int column);
  int column() const { return column_; }

 private:
  int column_;
};

/// Evaluation outside the domain of a function; [begin, end) is the
/// 1-based source span of the offending subexpression.
class ExprDomainError : public std::domain_error {
 public:
  ExprDomainError(const std::string& message, int begin, int end);
  int begin() const { return begin_; }
  int end() const { return end_; }

 private:
  int begin_;
  int end_;
};

enum class Func { exp, log, sqrt, abs, sin, cos, min, max, pow };

struct Expr {
  enum class Kind { number, variable, negate, add, sub, mul, div, power, call };

  Kind kind = Kind::number;
  double value = 0.0;
  /// Variable slot into the evaluation environment.
  int slot = 0;
  std::string name;
  Func func = Func::exp;
  std::vector<Expr> args;
  /// Source span, 1-based, half-open; not part of equality.
  int begin = 0;
  int end = 0;

  static Expr number(double v);
  static Expr variable(std::string name, int slot);
  static Expr unary(Expr operand);
  static Expr binary(Kind kind, Expr lhs, Expr rhs);
  static Expr call(Func f, std::vector<Expr> args);

  /// Values of the variables, indexed by slot.
  double evaluate(std::span<const double> env) const;
  bool uses(int slot) const;
};

bool operator==(const Expr& a, const Expr& b);

std::string function_name(Func f);
int function_arity(Func f);

/// Parses `text`; identifiers resolve to their position in `variables`.
Expr parse_expr(const std::string& text, const std::vector<std::string>& variables);

/// Shortest parenthesization that parses back to the same tree.
std::string print_expr(const Expr& e);

}  // namespace sublin::cli
