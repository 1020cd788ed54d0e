#pragma once

#include <array>
#include <memory>
#include <string>
#include <string_view>
#include <variant>

#include "fracocp/grid.hpp"

namespace fracocp {

/**
 * Closed-form scalar expression in x1, x2.
 *
 * Grammar (lowest to highest precedence):
 *   expr   := term (('+' | '-') term)*
 *   term   := unary (('*' | '/') unary)*
 *   unary  := ('-' | '+') unary | power
 *   power  := atom ('^' unary)?          right-associative
 *   atom   := number | x1 | x2 | pi | func '(' expr ')' | '(' expr ')'
 *   func   := sin | cos | exp | abs | sqrt
 */
class Expr {
 public:
  enum class Func { Sin, Cos, Exp, Abs, Sqrt };
  enum class BinOp { Add, Sub, Mul, Div, Pow };

  struct Number {
    double value;
  };
  struct Variable {
    int axis;  // 0 or 1
  };
  struct Negate {
    std::shared_ptr<const Expr> arg;
  };
  struct Call {
    Func func;
    std::shared_ptr<const Expr> arg;
  };
  struct Binary {
    BinOp op;
    std::shared_ptr<const Expr> lhs;
    std::shared_ptr<const Expr> rhs;
  };
  using Node = std::variant<Number, Variable, Negate, Call, Binary>;

  explicit Expr(Node node) : node_(std::move(node)) {}

  const Node& node() const { return node_; }

  /// Highest variable index used plus one (0 for constants).
  int arity() const;

  /// Throws std::domain_error on division by zero, sqrt of a negative
  /// number, or a non-finite result.
  double eval(const std::array<double, 2>& x) const;

  /// Fully parenthesized text; parse(to_string()) rebuilds an identical tree.
  std::string to_string() const;

  bool operator==(const Expr& other) const;

 private:
  Node node_;
};

/// Throws ParseError (with byte offset) on syntax errors, unknown identifiers,
/// wrong argument counts, and unbalanced parentheses. Variables beyond `dim`
/// are rejected.
Expr parse_expr(std::string_view text, int dim = 2);

/// Nodewise evaluation. Throws std::domain_error naming the node on domain errors.
Field eval_on_grid(const Expr& e, GridPtr grid);

}  // namespace fracocp
