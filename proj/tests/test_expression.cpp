#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "mhdnat/expression.hpp"
#include "mhdnat/scalar_fn.hpp"
#include "mhdnat/state_function.hpp"

using namespace mhdnat;

namespace {

double eval(const char* text, std::vector<double> args, std::vector<std::string> vars) {
  return Expression::parse(text, std::move(vars)).eval(std::span<const double>(args));
}

}  // namespace

TEST(Expression, Precedence) {
  EXPECT_DOUBLE_EQ(eval("1 + 2 * 3", {}, {}), 7.0);
  EXPECT_DOUBLE_EQ(eval("(1 + 2) * 3", {}, {}), 9.0);
  EXPECT_DOUBLE_EQ(eval("2 ^ 3 ^ 2", {}, {}), 512.0);
  EXPECT_DOUBLE_EQ(eval("-2 ^ 2", {}, {}), -4.0);
  EXPECT_DOUBLE_EQ(eval("2 ** 3", {}, {}), 8.0);
  EXPECT_DOUBLE_EQ(eval("8 / 4 / 2", {}, {}), 1.0);
  EXPECT_DOUBLE_EQ(eval("1 - 2 - 3", {}, {}), -4.0);
}

TEST(Expression, FunctionsAndConstants) {
  EXPECT_NEAR(eval("sin(pi / 2) + cos(0)", {}, {}), 2.0, 1e-15);
  EXPECT_NEAR(eval("log(e)", {}, {}), 1.0, 1e-15);
  EXPECT_NEAR(eval("pow(x, 3)", {2.0}, {"x"}), 8.0, 1e-15);
  EXPECT_NEAR(eval("sqrt(x) * exp(y)", {4.0, 0.0}, {"x", "y"}), 2.0, 1e-15);
  EXPECT_NEAR(eval_constant("2*pi"), 2.0 * std::numbers::pi, 1e-15);
}

TEST(Expression, RejectsUnknownNamesAndBadSyntax) {
  EXPECT_THROW(Expression::parse("x + y", {"x"}), ExpressionError);
  EXPECT_THROW(Expression::parse("sin(", {}), ExpressionError);
  EXPECT_THROW(Expression::parse("1 +", {}), ExpressionError);
  EXPECT_THROW(Expression::parse("foo(1)", {}), ExpressionError);
  EXPECT_THROW(Expression::parse("2 3", {}), ExpressionError);
  EXPECT_THROW(eval_constant("x"), ExpressionError);
}

TEST(Expression, JetMatchesSymbolicAndFiniteDifference) {
  const auto e = Expression::parse("sin(x*y) + x^3 / (1 + y^2) + sqrt(1 + x^2)", {"x", "y"});
  const double x = 0.7, y = -1.3;
  const std::array<Jet, 2> j{Jet::variable(x, 0), Jet::variable(y, 1)};
  const Jet r = e.eval(std::span<const Jet>(j));
  const std::array<double, 2> a{x, y};
  EXPECT_NEAR(r.v, e.eval(std::span<const double>(a)), 1e-15);
  const auto ex = e.derivative("x"), ey = e.derivative("y");
  EXPECT_NEAR(r.d[0], ex.eval(std::span<const double>(a)), 1e-13);
  EXPECT_NEAR(r.d[1], ey.eval(std::span<const double>(a)), 1e-13);
  EXPECT_NEAR(r.hess(0, 1), ex.derivative("y").eval(std::span<const double>(a)), 1e-12);
  EXPECT_NEAR(r.hess(0, 0), ex.derivative("x").eval(std::span<const double>(a)), 1e-12);

  const double h = 1e-5;
  const std::array<double, 2> ap{x + h, y}, am{x - h, y};
  const double fd = (e.eval(std::span<const double>(ap)) - e.eval(std::span<const double>(am))) / (2 * h);
  EXPECT_NEAR(r.d[0], fd, 1e-8);
}

TEST(ScalarFn, ConstantAndDerivative) {
  const auto f = ScalarFn2::parse("xi2 * xi3^2", {"xi2", "xi3"});
  EXPECT_FALSE(f.constant_value());
  EXPECT_DOUBLE_EQ(f(ScalarFn2::Args{2.0, 3.0}), 18.0);
  EXPECT_DOUBLE_EQ(f.derivative(1)(ScalarFn2::Args{2.0, 3.0}), 12.0);
  const auto c = ScalarFn1::parse("3", {"mu"});
  ASSERT_TRUE(c.constant_value());
  EXPECT_DOUBLE_EQ(*c.constant_value(), 3.0);
}

TEST(StateFunction, PartialsFromJets) {
  const auto h = StateFunction::parse("p^2 * rho + exp(rho)");
  const auto d = h.partials(2.0, 0.5);
  EXPECT_NEAR(d.h, 4.0 * 0.5 + std::exp(0.5), 1e-14);
  EXPECT_NEAR(d.h_p, 2.0 * 2.0 * 0.5, 1e-14);
  EXPECT_NEAR(d.h_rho, 4.0 + std::exp(0.5), 1e-14);
}
