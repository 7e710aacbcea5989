#pragma once

#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mhdnat/jet.hpp"

namespace mhdnat {

class ExpressionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Free-function grammar used by every family, transform and state function.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('+' | '-') unary | power
//   power   := primary (('^' | '**') unary)?
//   primary := number | name | name '(' expr (',' expr)* ')' | '(' expr ')'
//
// Functions: sin cos tan exp log sqrt sinh cosh tanh atan asin acos abs pow.
// Constants: pi, e. Every other name must be one of the declared variables.
// Expressions evaluate on doubles and on second-order jets, and can be
// differentiated symbolically.
class Expression {
 public:
  struct Node;

  Expression();  // constant zero, no variables

  static Expression parse(std::string_view text, std::vector<std::string> variables);
  static Expression constant(double value, std::vector<std::string> variables = {});

  double eval(std::span<const double> args) const;
  Jet eval(std::span<const Jet> args) const;

  // Symbolic partial derivative with respect to a declared variable.
  Expression derivative(std::string_view variable) const;

  bool is_constant() const;
  const std::string& text() const { return text_; }
  const std::vector<std::string>& variables() const { return variables_; }
  std::size_t arity() const { return variables_.size(); }

 private:
  Expression(std::shared_ptr<const Node> root, std::vector<std::string> variables, std::string text);

  std::shared_ptr<const Node> root_;
  std::vector<std::string> variables_;
  std::string text_;
};

// Evaluates a constant expression such as "2*pi" (no variables allowed).
double eval_constant(std::string_view text);

}  // namespace mhdnat
