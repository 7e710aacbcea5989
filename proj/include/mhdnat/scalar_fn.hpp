#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <type_traits>
#include <utility>

#include "mhdnat/expression.hpp"
#include "mhdnat/jet.hpp"

namespace mhdnat {

// Smooth scalar function of K arguments. Values are always available; jets
// (exact first and second derivatives) are available for parsed expressions
// and for generic callables written against both double and Jet.
template <int K>
class ScalarFn {
 public:
  using Args = std::array<double, K>;
  using JetArgs = std::array<Jet, K>;
  using ValueFn = std::function<double(const Args&)>;
  using JetFn = std::function<Jet(const JetArgs&)>;

  ScalarFn() : ScalarFn(constant(0.0)) {}

  static ScalarFn parse(std::string_view text, const std::array<std::string, K>& names) {
    return from_expression(Expression::parse(text, std::vector<std::string>(names.begin(), names.end())));
  }

  static ScalarFn from_expression(Expression e) {
    if (e.arity() != K) throw ExpressionError("expression \"" + e.text() + "\" has the wrong number of variables");
    ScalarFn fn(0);
    fn.value_ = [e](const Args& x) { return e.eval(std::span<const double>(x)); };
    fn.jet_ = [e](const JetArgs& x) { return e.eval(std::span<const Jet>(x)); };
    fn.text_ = e.text();
    if (e.is_constant()) fn.constant_ = e.eval(std::span<const double>(Args{}));
    fn.expr_ = std::move(e);
    return fn;
  }

  static ScalarFn constant(double c) {
    ScalarFn fn(0);
    fn.value_ = [c](const Args&) { return c; };
    fn.jet_ = [c](const JetArgs&) { return Jet(c); };
    fn.constant_ = c;
    fn.text_ = Expression::constant(c).text();
    return fn;
  }

  // f must be callable as f(const std::array<T, K>&) -> T for T = double and T = Jet.
  template <class F>
  static ScalarFn generic(F f, std::string label) {
    ScalarFn fn(0);
    fn.value_ = [f](const Args& x) { return f(x); };
    fn.jet_ = [f](const JetArgs& x) { return f(x); };
    fn.text_ = std::move(label);
    return fn;
  }

  static ScalarFn values_only(ValueFn v, std::string label) {
    ScalarFn fn(0);
    fn.value_ = std::move(v);
    fn.text_ = std::move(label);
    return fn;
  }

  double operator()(const Args& x) const { return value_(x); }
  Jet operator()(const JetArgs& x) const {
    if (!jet_) throw ExpressionError("function \"" + text_ + "\" has no closed-form derivatives");
    return jet_(x);
  }

  template <int M = K, std::enable_if_t<M == 1, int> = 0>
  double operator()(double x) const {
    return value_(Args{x});
  }
  template <int M = K, std::enable_if_t<M == 1, int> = 0>
  Jet operator()(const Jet& x) const {
    return (*this)(JetArgs{x});
  }

  bool has_jet() const { return static_cast<bool>(jet_); }
  bool has_expression() const { return expr_.has_value(); }
  const Expression& expression() const { return *expr_; }
  std::optional<double> constant_value() const { return constant_; }
  const std::string& text() const { return text_; }

  // Symbolic derivative with respect to argument i; only for parsed expressions.
  ScalarFn derivative(int i) const {
    if (constant_) return constant(0.0);
    if (!expr_) throw ExpressionError("function \"" + text_ + "\" cannot be differentiated symbolically");
    return from_expression(expr_->derivative(expr_->variables()[static_cast<std::size_t>(i)]));
  }

 private:
  explicit ScalarFn(int) {}

  ValueFn value_;
  JetFn jet_;
  std::optional<Expression> expr_;
  std::optional<double> constant_;
  std::string text_;
};

using ScalarFn1 = ScalarFn<1>;
using ScalarFn2 = ScalarFn<2>;
using ScalarFn3 = ScalarFn<3>;

}  // namespace mhdnat
