#pragma once

// Arithmetic expressions over t and x1..x8, used for user-defined fields.
//
// Precedence, lowest to highest:
//   + -        (binary, left-associative)
//   * /        (binary, left-associative)
//   -          (unary)
//   ^          (right-associative, binds tighter than unary minus)
//
// so "-2^2" is -(2^2) = -4 and "2^-1" is 0.5. Functions: sin cos exp log
// sqrt tanh abs (one argument), min max pow (two arguments).

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "pathind/numerics.hpp"

namespace pathind {

enum class Function { Sin, Cos, Exp, Log, Sqrt, Tanh, Abs, Min, Max, Pow };

struct ExprNode;

class Expr {
 public:
  // Throws SyntaxError, UnknownIdentifier (including x<k> with k above
  // max_dimension) or ArityError.
  static Expr parse(std::string_view text, int max_dimension = kMaxDim);

  static Expr number(double value);
  static Expr time();
  static Expr variable(int index);  // 1-based, x1..x8
  static Expr negate(Expr operand);
  static Expr binary(char op, Expr lhs, Expr rhs);
  static Expr call(Function fn, std::vector<Expr> args);

  // Throws DomainError for non-finite results (log/sqrt of negatives,
  // division by zero, overflow) and UnboundVariable when x has too few
  // components.
  [[nodiscard]] double eval(double t, const Vec& x) const;

  // Fully parenthesized; re-parses to an equal tree.
  [[nodiscard]] std::string to_string() const;

  // Highest x index referenced, 0 when the expression uses only t.
  [[nodiscard]] int max_variable_index() const;
  [[nodiscard]] bool uses_time() const;

  [[nodiscard]] const ExprNode& root() const { return *root_; }

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  explicit Expr(std::shared_ptr<const ExprNode> root) : root_(std::move(root)) {}
  std::shared_ptr<const ExprNode> root_;
};

struct ExprNode {
  enum class Kind { Number, Time, Variable, Negate, Binary, Call };
  Kind kind = Kind::Number;
  double value = 0.0;
  int variable = 0;
  char op = 0;
  Function fn = Function::Sin;
  std::vector<Expr> args;
};

std::string_view function_name(Function fn);
int function_arity(Function fn);

}  // namespace pathind
