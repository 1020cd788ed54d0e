#include "fracocp/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <stdexcept>
#include <string>

#include "fracocp/errors.hpp"
#include "fracocp/field_io.hpp"

namespace fracocp {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

const char* func_name(Expr::Func f) {
  switch (f) {
    case Expr::Func::Sin:
      return "sin";
    case Expr::Func::Cos:
      return "cos";
    case Expr::Func::Exp:
      return "exp";
    case Expr::Func::Abs:
      return "abs";
    case Expr::Func::Sqrt:
      return "sqrt";
  }
  return "?";
}

char op_char(Expr::BinOp op) {
  switch (op) {
    case Expr::BinOp::Add:
      return '+';
    case Expr::BinOp::Sub:
      return '-';
    case Expr::BinOp::Mul:
      return '*';
    case Expr::BinOp::Div:
      return '/';
    case Expr::BinOp::Pow:
      return '^';
  }
  return '?';
}

using ExprPtr = std::shared_ptr<const Expr>;

ExprPtr make(Expr::Node n) { return std::make_shared<const Expr>(std::move(n)); }

class Parser {
 public:
  Parser(std::string_view text, int dim) : text_(text), dim_(dim) {}

  Expr run() {
    skip_ws();
    if (pos_ == text_.size()) throw ParseError("empty expression", pos_);
    ExprPtr e = expr();
    skip_ws();
    if (pos_ != text_.size()) {
      if (text_[pos_] == ')') throw ParseError("unbalanced ')'", pos_);
      throw ParseError(std::string("unexpected '") + text_[pos_] + "'", pos_);
    }
    return *e;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  ExprPtr expr() {
    ExprPtr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = make(Expr::Binary{Expr::BinOp::Add, lhs, term()});
      } else if (accept('-')) {
        lhs = make(Expr::Binary{Expr::BinOp::Sub, lhs, term()});
      } else {
        return lhs;
      }
    }
  }

  ExprPtr term() {
    ExprPtr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = make(Expr::Binary{Expr::BinOp::Mul, lhs, unary()});
      } else if (accept('/')) {
        lhs = make(Expr::Binary{Expr::BinOp::Div, lhs, unary()});
      } else {
        return lhs;
      }
    }
  }

  ExprPtr unary() {
    if (accept('-')) return make(Expr::Negate{unary()});
    if (accept('+')) return unary();
    return power();
  }

  ExprPtr power() {
    ExprPtr base = atom();
    if (accept('^')) return make(Expr::Binary{Expr::BinOp::Pow, base, unary()});
    return base;
  }

  ExprPtr atom() {
    skip_ws();
    if (pos_ == text_.size()) throw ParseError("unexpected end of expression", pos_);
    const char c = text_[pos_];
    if (c == '(') {
      const std::size_t open = pos_++;
      ExprPtr inner = expr();
      if (!accept(')')) throw ParseError("unbalanced '(' opened", open);
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    throw ParseError(std::string("unexpected '") + c + "'", pos_);
  }

  ExprPtr number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
      ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
      if (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) {
        while (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) ++p;
        pos_ = p;
      }
    }
    const std::string lexeme(text_.substr(start, pos_ - start));
    char* end = nullptr;
    const double v = std::strtod(lexeme.c_str(), &end);
    if (end != lexeme.c_str() + lexeme.size() || !std::isfinite(v)) {
      throw ParseError("malformed number '" + lexeme + "'", start);
    }
    return make(Expr::Number{v});
  }

  ExprPtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    const std::string id(text_.substr(start, pos_ - start));
    if (id == "x1" || id == "x2") {
      const int axis = id[1] - '1';
      if (axis >= dim_) throw ParseError("unknown variable " + id + " in " + std::to_string(dim_) + "D", start);
      return make(Expr::Variable{axis});
    }
    if (id == "pi") return make(Expr::Number{std::numbers::pi});
    Expr::Func f{};
    if (id == "sin") {
      f = Expr::Func::Sin;
    } else if (id == "cos") {
      f = Expr::Func::Cos;
    } else if (id == "exp") {
      f = Expr::Func::Exp;
    } else if (id == "abs") {
      f = Expr::Func::Abs;
    } else if (id == "sqrt") {
      f = Expr::Func::Sqrt;
    } else {
      throw ParseError("unknown identifier '" + id + "'", start);
    }
    if (!accept('(')) throw ParseError("expected '(' after " + id, pos_);
    const std::size_t open = pos_ - 1;
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == ')') throw ParseError(id + " takes exactly 1 argument, got 0", pos_);
    ExprPtr arg = expr();
    if (accept(',')) throw ParseError(id + " takes exactly 1 argument", pos_ - 1);
    if (!accept(')')) throw ParseError("unbalanced '(' opened", open);
    return make(Expr::Call{f, arg});
  }

  std::string_view text_;
  int dim_;
  std::size_t pos_ = 0;
};

}  // namespace

int Expr::arity() const {
  return std::visit(Overloaded{
                        [](const Number&) { return 0; },
                        [](const Variable& v) { return v.axis + 1; },
                        [](const Negate& n) { return n.arg->arity(); },
                        [](const Call& c) { return c.arg->arity(); },
                        [](const Binary& b) { return std::max(b.lhs->arity(), b.rhs->arity()); },
                    },
                    node_);
}

double Expr::eval(const std::array<double, 2>& x) const {
  const double v = std::visit(
      Overloaded{
          [](const Number& n) { return n.value; },
          [&](const Variable& v) { return x[static_cast<std::size_t>(v.axis)]; },
          [&](const Negate& n) { return -n.arg->eval(x); },
          [&](const Call& c) {
            const double a = c.arg->eval(x);
            switch (c.func) {
              case Func::Sin:
                return std::sin(a);
              case Func::Cos:
                return std::cos(a);
              case Func::Exp:
                return std::exp(a);
              case Func::Abs:
                return std::abs(a);
              case Func::Sqrt:
                if (a < 0.0) throw std::domain_error("sqrt of negative number");
                return std::sqrt(a);
            }
            return 0.0;
          },
          [&](const Binary& b) {
            const double l = b.lhs->eval(x);
            const double r = b.rhs->eval(x);
            switch (b.op) {
              case BinOp::Add:
                return l + r;
              case BinOp::Sub:
                return l - r;
              case BinOp::Mul:
                return l * r;
              case BinOp::Div:
                if (r == 0.0) throw std::domain_error("division by zero");
                return l / r;
              case BinOp::Pow:
                return std::pow(l, r);
            }
            return 0.0;
          },
      },
      node_);
  if (!std::isfinite(v)) throw std::domain_error("non-finite value");
  return v;
}

std::string Expr::to_string() const {
  return std::visit(Overloaded{
                        [](const Number& n) { return format_double(n.value); },
                        [](const Variable& v) { return std::string(v.axis == 0 ? "x1" : "x2"); },
                        [](const Negate& n) { return "(-" + n.arg->to_string() + ")"; },
                        [](const Call& c) { return std::string(func_name(c.func)) + "(" + c.arg->to_string() + ")"; },
                        [](const Binary& b) {
                          return "(" + b.lhs->to_string() + op_char(b.op) + b.rhs->to_string() + ")";
                        },
                    },
                    node_);
}

bool Expr::operator==(const Expr& other) const {
  if (node_.index() != other.node_.index()) return false;
  return std::visit(Overloaded{
                        [&](const Number& n) { return n.value == std::get<Number>(other.node_).value; },
                        [&](const Variable& v) { return v.axis == std::get<Variable>(other.node_).axis; },
                        [&](const Negate& n) { return *n.arg == *std::get<Negate>(other.node_).arg; },
                        [&](const Call& c) {
                          const auto& o = std::get<Call>(other.node_);
                          return c.func == o.func && *c.arg == *o.arg;
                        },
                        [&](const Binary& b) {
                          const auto& o = std::get<Binary>(other.node_);
                          return b.op == o.op && *b.lhs == *o.lhs && *b.rhs == *o.rhs;
                        },
                    },
                    node_);
}

Expr parse_expr(std::string_view text, int dim) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("parse_expr: dim must be 1 or 2");
  return Parser(text, dim).run();
}

Field eval_on_grid(const Expr& e, GridPtr grid) {
  if (e.arity() > grid->dim()) {
    throw std::invalid_argument("unknown variable x" + std::to_string(e.arity()) + " in " +
                                std::to_string(grid->dim()) + "D");
  }
  Eigen::VectorXd v(grid->size());
  for (std::size_t i = 0; i < grid->size(); ++i) {
    const auto x = grid->node(i);
    try {
      v[static_cast<Eigen::Index>(i)] = e.eval(x);
    } catch (const std::domain_error& err) {
      std::string where = "x1=" + format_double(x[0]);
      if (grid->dim() == 2) where += ", x2=" + format_double(x[1]);
      throw std::domain_error(std::string(err.what()) + " at node " + std::to_string(i) + " (" + where + ")");
    }
  }
  return Field(std::move(grid), std::move(v));
}

}  // namespace fracocp
