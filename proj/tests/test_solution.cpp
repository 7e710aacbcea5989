#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "mhdnat/families.hpp"
#include "mhdnat/field_expr.hpp"
#include "mhdnat/solution.hpp"

using namespace mhdnat;

namespace {

constexpr double kPi = std::numbers::pi;

DomainBox box() { return FamilyOptions::default_box(); }

Solution explicit_solution(const std::array<std::string, 3>& gamma, const std::string& P) {
  Solution s;
  s.family = "explicit";
  s.gamma = parse_map(gamma, box());
  s.pressure = TotalPressure{parse_scalar_field(P, box())};
  s.set_domain(box());
  return s;
}

GridSpec grid(int n = 5) {
  return GridSpec::uniform({Interval{0.0, 1.0}, Interval{0.0, 2 * kPi}, Interval{0.0, 2 * kPi}, Interval{0.5, 1.0}},
                           n);
}

}  // namespace

TEST(Residuals, StaticSolutionIsExact) {
  const Solution s = build_static();
  EXPECT_TRUE(residual_incompressible(s, grid()).passed);
  EXPECT_TRUE(eulerian_residual(s, grid()).passed);
  EXPECT_TRUE(cauchy_check(s, grid()).passed);
  EXPECT_EQ(residual_incompressible(s, grid()).max_norm(), 0.0);
}

// gamma1 = xi1 + eps sin(xi1), P constant: the momentum residual is
// eps |sin xi1|, the constraint eps cos xi1, and in Eulerian form
// B = (1 + eps cos xi1) e_x has divergence -eps sin xi1 / (1 + eps cos xi1).
TEST(Residuals, PerturbedStaticMatchesHandDerivedResiduals) {
  const double eps = 1e-3;
  const Solution s = explicit_solution({"xi1 + 0.001*sin(xi1)", "xi2", "xi3"}, "1");
  const GridSpec g = GridSpec::uniform({Interval{0.0, 1.0}, Interval{0.0, 2 * kPi}, Interval{0.0, 1.0},
                                        Interval{0.5, 1.0}}, 9);  // xi1 hits pi/2 and 0
  const auto inc = residual_incompressible(s, g);
  EXPECT_NEAR(inc.equation("momentum").max_norm, eps, 1e-15);
  EXPECT_NEAR(inc.equation("constraint").max_norm, eps, 1e-15);
  EXPECT_FALSE(inc.passed);
  const auto c = cauchy_check(s, g);
  EXPECT_NEAR(c.equation("variation_xi1").max_norm, eps, 1e-15);
  EXPECT_NEAR(c.equation("variation_t").max_norm, 0.0, 1e-15);
  const auto e = eulerian_residual(s, g);
  double div = 0.0;
  for (int i = 0; i < 9; ++i) {
    const double x = 2 * kPi * i / 8;
    div = std::max(div, std::abs(eps * std::sin(x) / (1 + eps * std::cos(x))));
  }
  EXPECT_NEAR(e.equation("divergence").max_norm, div, 1e-15);
}

// gamma = xi, rho = 1 + xi2/10, p = P0 - rho^2/2: B = rho e_x balances the
// gas pressure gradient exactly.
TEST(Residuals, CompressibleStaticWithDensityGradient) {
  Solution s;
  s.family = "explicit";
  s.gamma = parse_map({"xi1", "xi2", "xi3"}, box());
  s.density = parse_scalar_field("1 + xi2/10", box());
  s.pressure = GasPressure{parse_scalar_field("2 - (1 + xi2/10)^2/2", box()), std::nullopt, std::nullopt};
  s.f = ScalarFn2::parse("1 + xi2/10", {"xi2", "xi3"});
  s.set_domain(box());
  const auto h = StateFunction::parse("p / rho");
  const auto r = residual_compressible(s, h, grid(), {});
  EXPECT_TRUE(r.passed) << r.to_json().dump();
  EXPECT_LT(r.max_norm(), 1e-13);
  EXPECT_TRUE(eulerian_residual(s, grid()).passed);
  EXPECT_THROW(residual_incompressible(s, grid()), std::invalid_argument);
}

TEST(Residuals, SerialAndParallelReportsAreIdentical) {
  const Solution s = build_torus_knot(sol13_params());
  CheckOptions serial, parallel;
  serial.exec = Execution::serial;
  parallel.exec = Execution::parallel;
  EXPECT_EQ(residual_incompressible(s, grid(), serial).to_json().dump(),
            residual_incompressible(s, grid(), parallel).to_json().dump());
  EXPECT_EQ(eulerian_residual(s, grid(), serial).to_json().dump(),
            eulerian_residual(s, grid(), parallel).to_json().dump());
}

TEST(Residuals, SingularPointsAreExcludedAndCounted) {
  DomainBox b = box();
  b.axes[3] = {-2.0, 2.0};
  Solution s;
  s.gamma = parse_map({"xi1", "xi2", "xi3^3"}, b);
  s.pressure = TotalPressure{parse_scalar_field("1", b)};
  s.f = ScalarFn2::parse("3*xi3^2", {"xi2", "xi3"});
  s.set_domain(b);
  const GridSpec g = GridSpec::uniform({Interval{0, 1}, Interval{0, 1}, Interval{0, 1}, Interval{-1, 1}}, 3);
  const auto r = residual_incompressible(s, g);
  EXPECT_EQ(r.excluded, 27u);
  EXPECT_EQ(r.points, 81u);
  EXPECT_FALSE(r.passed);  // a third of the grid is excluded
  EXPECT_EQ(r.max_norm(), 0.0);
}

TEST(Residuals, GridOutsideDomainIsRejected) {
  const Solution s = build_static();
  const GridSpec g = GridSpec::uniform({Interval{0, 5}, Interval{0, 1}, Interval{0, 1}, Interval{0.5, 1}}, 3);
  EXPECT_THROW(residual_incompressible(s, g), std::invalid_argument);
}

// Natural-coordinate and Eulerian verdicts agree (Eulerian tolerance 10x).
TEST(Residuals, FormulationsAgreeOnExactAndPerturbedSolutions) {
  std::vector<Solution> cases{build_static(), build_torus_knot(sol13_params()), build_torus_knot(sol14_params())};
  const auto delta = parse_scalar_field("sin(xi1 + t) * xi3", box());
  for (double amp : {1e-3, 1e-2}) {
    cases.push_back(perturb(build_torus_knot(sol13_params()), 0, delta, amp));
    cases.push_back(perturb(build_static(), 2, delta, amp));
  }
  CheckOptions inc, eul;
  inc.tolerance = 1e-6;
  eul.tolerance = 1e-5;
  for (const auto& s : cases) {
    const bool a = residual_incompressible(s, grid()).passed;
    const bool b = eulerian_residual(s, grid(), eul).passed;
    EXPECT_EQ(a, b) << s.family;
  }
}

TEST(Residuals, ResidualGrowsWithPerturbationAmplitude) {
  const auto delta = parse_scalar_field("sin(xi1 + t) * xi3", box());
  const Solution base = build_torus_knot(sol13_params());
  double last = 0.0;
  for (double amp : {1e-6, 1e-5, 1e-4, 1e-3}) {
    const double r = residual_incompressible(perturb(base, 1, delta, amp), grid()).max_norm();
    EXPECT_GT(r, last) << amp;
    last = r;
  }
  const double p1 = residual_incompressible(perturb_pressure(base, delta, 1e-4), grid()).max_norm();
  const double p2 = residual_incompressible(perturb_pressure(base, delta, 1e-3), grid()).max_norm();
  EXPECT_GT(p2, p1);
  EXPECT_GT(p1, 1e-6);
}

TEST(Residuals, FiniteDifferencePathAgreesWithClosedForm) {
  Solution s = build_torus_knot(sol14_params());
  const auto cf = residual_incompressible(s, grid());
  s.diff.mode = DerivativeMode::finite_difference;
  CheckOptions opt;
  opt.tolerance = 1e-4;
  const auto fd = residual_incompressible(s, grid(), opt);
  EXPECT_TRUE(fd.passed) << fd.max_norm();
  EXPECT_EQ(fd.mode, DerivativeMode::finite_difference);
  EXPECT_LT(cf.max_norm(), 1e-10);
}

TEST(Residuals, ReportSerializesEveryField) {
  const auto r = residual_incompressible(build_static(), grid(3));
  const auto j = r.to_json();
  for (const char* k : {"check", "passed", "tolerance", "points", "excluded", "derivatives", "equations", "max", "notes"})
    EXPECT_TRUE(j.contains(k)) << k;
  EXPECT_EQ(j["equations"].size(), 2u);
  EXPECT_EQ(j["equations"][0]["name"], "momentum");
  EXPECT_EQ(j["points"], 81);
}

TEST(Eulerian, FieldsOfStaticSolution) {
  const auto s = eulerian_fields(build_static(), {0.5, 0.1, 0.2, 0.7});
  EXPECT_NEAR((s.x - Vec3(0.1, 0.2, 0.7)).norm(), 0.0, 1e-15);
  EXPECT_NEAR(s.u.norm(), 0.0, 1e-15);
  EXPECT_NEAR((s.B - Vec3(1, 0, 0)).norm(), 0.0, 1e-15);
  EXPECT_NEAR(s.P, 1.0, 1e-15);
  EXPECT_NEAR(s.p, 0.5, 1e-15);
  EXPECT_THROW(eulerian_fields(build_static(), {10.0, 0, 0, 0.7}), DomainError);
}
