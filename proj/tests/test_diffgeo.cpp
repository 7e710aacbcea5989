#include <cmath>

#include <gtest/gtest.h>

#include "mhdnat/diffgeo.hpp"

using namespace mhdnat;
using std::cos, std::sin, std::exp;

namespace {

// Cylindrical coordinates: xi2 = angle, xi3 = radius, xi1 = height.
Map cylindrical() {
  return Map::generic([](const auto& x) {
    using T = std::decay_t<decltype(x[0])>;
    return std::array<T, 3>{x[3] * cos(x[2]), x[3] * sin(x[2]), x[1]};
  });
}

// A time-dependent map with all second partials nonzero.
Map twisted() {
  return Map::generic([](const auto& x) {
    using T = std::decay_t<decltype(x[0])>;
    return std::array<T, 3>{x[1] + 0.3 * sin(x[0] + x[2]) * x[3], x[2] * exp(0.2 * x[1]) + x[0] * x[0],
                            x[3] + 0.1 * cos(x[1] * x[3]) + x[0] * x[2]};
  });
}

DiffOptions fd(int order, double step, bool richardson = false) {
  return {DerivativeMode::finite_difference, StencilConfig{order, step, richardson}};
}

}  // namespace

TEST(Diffgeo, CylindricalJacobianAndMetric) {
  const Point4 p{0.0, 0.4, 0.9, 1.7};
  const auto j = jacobian(cylindrical(), p);
  EXPECT_NEAR(j.det, -1.7, 1e-14);  // columns (d/dz, d/dtheta, d/dr) form a left-handed frame
  const auto m = metric(cylindrical(), p);
  EXPECT_NEAR(m.g(0, 0), 1.0, 1e-14);
  EXPECT_NEAR(m.g(1, 1), 1.0, 1e-14);
  EXPECT_NEAR(m.g(2, 2), 1.7 * 1.7, 1e-13);
  EXPECT_NEAR(m.g(3, 3), 1.0, 1e-14);
  EXPECT_NEAR(m.g(2, 3), 0.0, 1e-14);
  EXPECT_NEAR(m.det_g, 1.7 * 1.7, 1e-12);
}

TEST(Diffgeo, CylindricalChristoffelSymbols) {
  const double r = 1.7;
  const auto c = christoffel(cylindrical(), {0.0, 0.4, 0.9, r});
  EXPECT_NEAR(c(3, 2, 2), -r, 1e-13);
  EXPECT_NEAR(c(2, 2, 3), 1.0 / r, 1e-13);
  EXPECT_NEAR(c(2, 3, 2), 1.0 / r, 1e-13);
  EXPECT_NEAR(c(1, 1, 1), 0.0, 1e-14);
  EXPECT_NEAR(c(3, 3, 3), 0.0, 1e-14);
  // Contracted symbol equals d log sqrt(det g).
  EXPECT_NEAR(c.trace(3), 1.0 / r, 1e-13);
}

// Independent route: differentiate the closed-form metric numerically and
// assemble Gamma from the textbook formula.
TEST(Diffgeo, ChristoffelMatchesMetricDerivatives) {
  const Map map = twisted();
  const Point4 p{0.3, 0.5, -0.2, 0.8};
  const auto c = christoffel(map, p);
  const auto m = metric(map, p);
  const double h = 1e-5;
  std::array<Mat4, 4> dg;
  for (int k = 0; k < 4; ++k) {
    Point4 a = p, b = p;
    a[k] += h;
    b[k] -= h;
    dg[k] = (metric(map, a).g - metric(map, b).g) / (2 * h);
  }
  for (int s = 0; s < 4; ++s)
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        double v = 0.0;
        for (int k = 0; k < 4; ++k) v += 0.5 * m.g_inv(s, k) * (dg[b](a, k) + dg[a](b, k) - dg[k](a, b));
        EXPECT_NEAR(c(s, a, b), v, 1e-8) << s << a << b;
      }
}

TEST(Diffgeo, FiniteDifferenceConvergesAtStencilOrder) {
  const Map map = twisted();
  const Point4 p{0.3, 0.5, -0.2, 0.8};
  const auto exact = derivatives(map, p, {});
  auto err = [&](const DiffOptions& opt) {
    const auto d = derivatives(map.without_jet(), p, opt);
    double e = 0.0;
    for (int a = 0; a < 4; ++a)
      for (int i = 0; i < 3; ++i) e = std::max(e, std::abs(d.d1[a][i] - exact.d1[a][i]));
    return e;
  };
  const double e2a = err(fd(2, 1e-2)), e2b = err(fd(2, 5e-3));
  EXPECT_NEAR(e2a / e2b, 4.0, 0.2);
  const double e4a = err(fd(4, 4e-2)), e4b = err(fd(4, 2e-2));
  EXPECT_NEAR(e4a / e4b, 16.0, 1.0);
  EXPECT_LT(err(fd(2, 1e-2, true)), e2a / 50.0);
}

TEST(Diffgeo, SecondDerivativesFiniteDifference) {
  const Map map = twisted();
  const Point4 p{0.3, 0.5, -0.2, 0.8};
  const auto exact = derivatives(map, p, {});
  const auto d = derivatives(map.without_jet(), p, fd(4, 1e-2));
  EXPECT_EQ(d.mode, DerivativeMode::finite_difference);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int i = 0; i < 3; ++i) EXPECT_NEAR(d.d2[a][b][i], exact.d2[a][b][i], 1e-6);
}

TEST(Diffgeo, StencilRespectsDomain) {
  DomainBox box;
  box.axes[3] = {0.5, 2.0};
  const Map map = cylindrical().without_jet().with_domain(box);
  EXPECT_THROW(derivatives(map, {0.0, 0.0, 0.0, 0.5001}, fd(4, 1e-3)), DomainError);
  EXPECT_NO_THROW(derivatives(map, {0.0, 0.0, 0.0, 1.0}, fd(4, 1e-3)));
}

TEST(Diffgeo, SingularMetricThrows) {
  EXPECT_THROW(metric(cylindrical(), {0.0, 0.0, 0.3, 0.0}), SingularError);
  EXPECT_THROW(StencilConfig({3, 1e-3, false}).validate(), std::invalid_argument);
}
