#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <variant>

namespace kemeny {

/// Immutable arithmetic expression in the single variable `x`.
///
///   expr   := term (('+' | '-') term)*
///   term   := factor (('*' | '/') factor)*
///   factor := '-'? power
///   power  := atom ('^' factor)?          (right-associative)
///   atom   := number | 'x' | fn '(' expr ')' | '(' expr ')'
///   fn     := exp | log | sqrt | abs | sin | cos
class Expr {
 public:
  enum class BinaryOp { Add, Sub, Mul, Div, Pow };
  enum class Function { Exp, Log, Sqrt, Abs, Sin, Cos };

  struct Number {
    double value;
  };
  struct Variable {};
  struct Negate {
    std::shared_ptr<const Expr> child;
  };
  struct Binary {
    BinaryOp op;
    std::shared_ptr<const Expr> lhs;
    std::shared_ptr<const Expr> rhs;
  };
  struct Call {
    Function fn;
    std::shared_ptr<const Expr> arg;
  };
  using Node = std::variant<Number, Variable, Negate, Binary, Call>;

  static Expr number(double value);
  static Expr variable();
  static Expr negate(Expr child);
  static Expr binary(BinaryOp op, Expr lhs, Expr rhs);
  static Expr call(Function fn, Expr arg);

  const Node& node() const noexcept { return *node_; }

  /// Throws DomainError for division by zero, log/sqrt outside their domain,
  /// negative bases with fractional exponents and any non-finite result.
  double operator()(double x) const;

  /// Fully parenthesized text that parses back to a structurally equal tree.
  std::string to_string() const;

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  explicit Expr(Node node) : node_(std::make_shared<const Node>(std::move(node))) {}
  std::shared_ptr<const Node> node_;
};

/// Throws ParseError (codes ParseError, UnknownFunction, UnknownIdentifier)
/// carrying the 1-based character position of the offending token.
Expr parse_expression(std::string_view source);

inline double eval_expression(const Expr& e, double x) { return e(x); }

std::string_view function_name(Expr::Function fn) noexcept;

}  // namespace kemeny
