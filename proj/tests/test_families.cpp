#include <cmath>
#include <numbers>
#include <random>

#include <fmt/format.h>
#include <gtest/gtest.h>

#include "mhdnat/families.hpp"
#include "mhdnat/solution.hpp"

using namespace mhdnat;

namespace {

constexpr double kPi = std::numbers::pi;

GridSpec grid(int n = 5) {
  return GridSpec::uniform({Interval{0.0, 1.0}, Interval{0.0, 2 * kPi}, Interval{0.0, 2 * kPi}, Interval{0.5, 1.0}},
                           n);
}

ScalarFn1 f1(const std::string& s, const char* var = "mu") { return ScalarFn1::parse(s, {var}); }
ScalarFn2 f2(const std::string& s) { return ScalarFn2::parse(s, {"xi2", "xi3"}); }
ScalarFn3 f3(const std::string& s) { return ScalarFn3::parse(s, {"mu", "xi2", "xi3"}); }

void expect_exact(const Solution& s, double tol = 1e-6) {
  CheckOptions opt;
  opt.tolerance = tol;
  const auto a = residual_incompressible(s, grid(), opt);
  const auto b = eulerian_residual(s, grid(), opt);
  const auto c = cauchy_check(s, grid(), opt);
  EXPECT_TRUE(a.passed) << s.family << " " << a.to_json().dump();
  EXPECT_TRUE(b.passed) << s.family << " " << b.to_json().dump();
  EXPECT_TRUE(c.passed) << s.family << " " << c.to_json().dump();
}

JetParams random_jet(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  JetParams p;
  p.A = f2(fmt::format("xi2 + {:.6f}*sin(xi3)", u(rng)));
  p.B = f2(fmt::format("xi3 + {:.6f}*cos(xi2)", u(rng)));
  p.alpha = f1(fmt::format("1.5 + {:.6f}*cos(mu)", u(rng)));
  p.beta = f1(fmt::format("1 + {:.6f}*sin(2*mu)", u(rng)));
  p.a = f1(fmt::format("{:.6f}*mu", u(rng)));
  p.b = f1(fmt::format("{:.6f}*cos(mu)", u(rng)));
  p.phi = f1(fmt::format("{:.6f}*mu", 2 * u(rng)));
  p.u1 = f1(fmt::format("{:.6f}*sin(s)", u(rng) + 1.0), "s");
  p.u2 = f1(fmt::format("{:.6f}*s^2", u(rng)), "s");
  return p;
}

TorusKnotParams random_torus_knot(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  std::uniform_int_distribution<int> m(1, 3);
  TorusKnotParams p;
  p.A = f2(fmt::format("xi2 + {:.6f}*sin(xi3)", u(rng)));
  p.B = f2("xi3");
  p.phi = f1(fmt::format("{}*mu", m(rng)));
  p.a = f1(fmt::format("{:.6f}*sin(mu)", u(rng)));
  p.b = f1(fmt::format("2 + {:.6f}*cos(mu)", u(rng)));
  p.k = m(rng);
  p.u = f1(fmt::format("{:.6f}*cos(s)", u(rng) + 1.0), "s");
  return p;
}

}  // namespace

TEST(Families, Sol13PositionsAndCauchyFunction) {
  const Solution s = build_torus_knot(sol13_params());
  const auto x = eulerian_fields(s, {0, 0, 0, 1}).x;
  EXPECT_NEAR((x - Vec3(0, std::sqrt(3.0), 0)).norm(), 0.0, 1e-14);
  // f = (k B / 2) d(A, B)/d(xi2, xi3) = xi3 for A = xi2, B = xi3, k = 2.
  for (double x3 : {0.3, 0.7, 1.2}) EXPECT_NEAR(s.f(ScalarFn2::Args{0.4, x3}), x3, 1e-15);
  EXPECT_EQ(s.family, "torus_knot");
}

TEST(Families, Sol14Position) {
  const Solution s = build_torus_knot(sol14_params());
  const auto x = eulerian_fields(s, {0, 0, 0, 1}).x;
  EXPECT_NEAR((x - Vec3(0, std::sqrt(5.0), 0)).norm(), 0.0, 1e-14);
}

TEST(Families, NamedInstancesAreExact) {
  expect_exact(build_static());
  expect_exact(build_torus_knot(sol13_params()));
  expect_exact(build_torus_knot(sol14_params()));
}

TEST(Families, FieldAlignedShear) {
  // Unit Jacobian: the rows are (1, 0.3 cos xi2, 0), (0, 1, 0), (0.2 cos mu, 0, 1).
  const VectorFn3 tau{f3("mu + 0.3*sin(xi2)"), f3("xi2"), f3("xi3 + 0.2*sin(mu)")};
  const Solution s = build_field_aligned(tau);
  expect_exact(s);
  const VectorFn3 bad{f3("mu"), f3("2*xi2"), f3("xi3")};
  EXPECT_THROW(build_field_aligned(bad), FamilyError);
}

TEST(Families, Dim3RotatingSheets) {
  Dim3Params p{f3("xi2*cos(mu) - xi3*sin(mu)"), f3("xi2*sin(mu) + xi3*cos(mu)"), f1("mu"), f1("0.2*sin(s)", "s"),
               f1("0.1*s", "s")};
  expect_exact(build_dim3(p));
  const ScalarFn2 wrong = ScalarFn2::constant(2.0);
  EXPECT_THROW(build_dim3(p, {}, &wrong), FamilyError);
  // tau3' d(tau1, tau2) depends on mu here.
  Dim3Params q = p;
  q.tau3 = f1("mu^2");
  EXPECT_THROW(build_dim3(q), FamilyError);
}

TEST(Families, Dim2FromTorusKnotAgrees) {
  const auto p = sol14_params();
  const Solution a = build_torus_knot(p);
  const Solution b = build_dim2(torus_knot_as_dim2(p));
  for (const Point4 at : {Point4{0.1, 0.3, 1.0, 0.8}, Point4{0.9, 5.0, 2.0, 0.6}}) {
    EXPECT_NEAR((eulerian_fields(a, at).x - eulerian_fields(b, at).x).norm(), 0.0, 1e-14);
    EXPECT_NEAR(a.f(ScalarFn2::Args{at.xi2, at.xi3}), b.f(ScalarFn2::Args{at.xi2, at.xi3}), 1e-10);
  }
}

TEST(Families, RandomJetDrawsAreExact) {
  std::mt19937_64 rng(20240607);
  for (int i = 0; i < 3; ++i) expect_exact(build_jet(random_jet(rng)));
}

TEST(Families, RandomTorusKnotDrawsAreExact) {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 3; ++i) expect_exact(build_torus_knot(random_torus_knot(rng)));
}

TEST(Families, ConstantTotalPressureWaveRelation) {
  std::mt19937_64 rng(5);
  std::vector<Solution> all{build_static(), build_torus_knot(sol13_params()), build_torus_knot(sol14_params()),
                            build_jet(random_jet(rng)), build_torus_knot(random_torus_knot(rng))};
  CheckOptions opt;
  opt.tolerance = 1e-8;
  for (const auto& s : all) {
    const auto r = wave_relation(s, grid(), opt);
    EXPECT_TRUE(r.passed) << s.family << " " << r.max_norm();
  }
}

TEST(Families, CauchyInvariantIndependentOfTimeAndXi1) {
  std::mt19937_64 rng(11);
  CheckOptions opt;
  opt.tolerance = 1e-8;
  for (const auto& s : {build_torus_knot(sol13_params()), build_jet(random_jet(rng))}) {
    const auto r = cauchy_check(s, grid(), opt);
    EXPECT_LE(r.equation("variation_t").max_norm, 1e-8) << s.family;
    EXPECT_LE(r.equation("variation_xi1").max_norm, 1e-8) << s.family;
  }
}

TEST(Families, TorusKnotMarginEnforced) {
  auto p = sol13_params();
  p.b = f1("1");  // b - |B| = 1 - 1.25 < 0 on the default box
  EXPECT_THROW(build_torus_knot(p), FamilyError);
  p = sol13_params();
  p.k = 0.0;
  EXPECT_THROW(build_torus_knot(p), FamilyError);
}

// Antiderivative of 1/(2 + cos mu) is (2/sqrt 3) atan(tan(mu/2)/sqrt 3) on |mu| < pi.
TEST(Families, ReciprocalQuadrature) {
  const ScalarFn1 tau3 = integrate_reciprocal(f1("1"), f1("2 + cos(mu)"), -3.0, 3.0);
  for (double mu : {-2.5, -1.0, 0.0, 0.7, 2.9}) {
    const double exact = 2.0 / std::sqrt(3.0) * std::atan(std::tan(mu / 2) / std::sqrt(3.0));
    EXPECT_NEAR(tau3(mu), exact, 1e-10) << mu;
    EXPECT_NEAR(tau3(Jet::variable(mu, 0)).d[0], 1.0 / (2 + std::cos(mu)), 1e-14);
  }
  EXPECT_THROW(integrate_reciprocal(f1("1"), f1("cos(mu)"), -3.0, 3.0), FamilyError);
  const Interval r = mu_range(FamilyOptions::default_box());
  EXPECT_DOUBLE_EQ(r.lo, -2.0);
  EXPECT_DOUBLE_EQ(r.hi, 2.0 + 2 * kPi + 1.0);
}
