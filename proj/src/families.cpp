#include "mhdnat/families.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <vector>

#include <fmt/format.h>

namespace mhdnat {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

template <class T>
using Arr3 = std::array<T, 3>;

double lerp(const Interval& iv, int i, int n) { return n == 1 ? iv.lo : iv.lo + (iv.hi - iv.lo) * i / (n - 1); }

// Visits (mu, xi2, xi3) samples of the construction grid.
template <class F>
void for_each_sample(const DomainBox& box, int n, F&& visit) {
  const Interval mu = mu_range(box);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) visit(lerp(mu, i, n), lerp(box.axes[2], j, n), lerp(box.axes[3], k, n));
}

Solution assemble(std::string family, Map gamma, ScalarFn2 f, const FamilyOptions& opt) {
  if (!opt.box.nonempty()) throw FamilyError("family " + family + ": empty domain box");
  Solution s;
  s.family = std::move(family);
  s.gamma = std::move(gamma);
  s.density = 1.0;
  s.pressure = TotalPressure{ScalarField::constant({opt.P0})};
  s.f = std::move(f);
  s.diff = opt.diff;
  s.set_domain(opt.box);
  return s;
}

// Checks that the derived product matches f over the construction grid and
// that f does not vanish.
template <class Product>
void check_cauchy_product(const std::string& family, const DomainBox& box, const FamilyOptions& opt,
                          const ScalarFn2& f, Product&& product) {
  double worst = -1.0;
  std::array<double, 3> at{};
  double fmin = std::numeric_limits<double>::infinity();
  for_each_sample(box, opt.check_points, [&](double mu, double x2, double x3) {
    const double fv = f(ScalarFn2::Args{x2, x3});
    const double err = std::abs(product(mu, x2, x3) - fv) / std::max(1.0, std::abs(fv));
    fmin = std::min(fmin, std::abs(fv));
    if (!(err <= worst)) {
      worst = err;
      at = {mu, x2, x3};
    }
  });
  if (!(worst <= opt.check_tolerance))
    throw FamilyError(fmt::format("family {}: Jacobian constraint violated by {:.3e} at mu = {}, xi2 = {}, xi3 = {}",
                                  family, worst, at[0], at[1], at[2]));
  if (!(fmin > 1e-12)) throw FamilyError(fmt::format("family {}: Cauchy function f vanishes on the domain", family));
}

// Clamps a reference mu into the construction range.
double reference_mu(const DomainBox& box) {
  const Interval mu = mu_range(box);
  return std::clamp(0.0, mu.lo, mu.hi);
}

double dim3_product(const Dim3Params& p, double mu, double x2, double x3) {
  const Arr3<Jet> a{Jet::variable(mu, 1), Jet::variable(x2, 2), Jet::variable(x3, 3)};
  const Jet t1 = p.tau1(a), t2 = p.tau2(a), t3 = p.tau3(a[0]);
  return t3.d[1] * (t1.d[2] * t2.d[3] - t1.d[3] * t2.d[2]);
}

double dim2_product(const Dim2Params& p, double mu, double x2, double x3) {
  const Arr3<Jet> a{Jet::variable(mu, 1), Jet::variable(x2, 2), Jet::variable(x3, 3)};
  const Jet lam = p.lambda(a), t1 = p.tau1(a);
  const std::array<Jet, 2> ml{Jet::variable(mu, 0), Jet::variable(lam.v, 1)};
  const Jet t2 = p.tau2(ml), t3 = p.tau3(ml);
  const double first = t2.d[0] * t3.d[1] - t2.d[1] * t3.d[0];
  const double second = lam.d[2] * t1.d[3] - lam.d[3] * t1.d[2];
  return first * second;
}

// Adaptive Simpson on a smooth integrand.
class Simpson {
 public:
  Simpson(std::function<double(double)> g, double tol) : g_(std::move(g)), tol_(tol) {}

  double integrate(double a, double b) const {
    if (a == b) return 0.0;
    const double fa = g_(a), fb = g_(b), m = 0.5 * (a + b), fm = g_(m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return refine(a, b, fa, fm, fb, whole, tol_, 0);
  }

 private:
  double refine(double a, double b, double fa, double fm, double fb, double whole, double tol, int depth) const {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = g_(lm), frm = g_(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (!std::isfinite(delta)) throw FamilyError("quadrature failure: non-finite integrand");
    if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    if (depth >= 48) throw FamilyError(fmt::format("quadrature failure near mu = {}", m));
    return refine(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) + refine(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
  }

  std::function<double(double)> g_;
  double tol_;
};

struct ReciprocalTable {
  ScalarFn1 alpha, beta;
  double lo = 0.0, step = 0.0;
  std::vector<double> value, slope;
  double tolerance = 1e-10;

  double g(double mu) const { return 1.0 / (alpha(mu) * beta(mu)); }

  double eval(double mu) const {
    const double hi = lo + step * static_cast<double>(value.size() - 1);
    if (mu < lo || mu > hi) {
      // Outside the table: integrate from the nearest end.
      const Simpson simpson([this](double x) { return g(x); }, tolerance);
      return mu < lo ? value.front() - simpson.integrate(mu, lo) : value.back() + simpson.integrate(hi, mu);
    }
    auto i = static_cast<std::size_t>((mu - lo) / step);
    if (i >= value.size() - 1) i = value.size() - 2;
    const double x0 = lo + step * static_cast<double>(i);
    const double t = (mu - x0) / step, t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * value[i] + (t3 - 2 * t2 + t) * step * slope[i] + (-2 * t3 + 3 * t2) * value[i + 1] +
           (t3 - t2) * step * slope[i + 1];
  }
};

}  // namespace

DomainBox FamilyOptions::default_box() {
  DomainBox b;
  b.axes = {Interval{-1.0, 2.0}, Interval{-1.0, kTwoPi + 1.0}, Interval{-1.0, kTwoPi + 1.0}, Interval{0.25, 1.25}};
  return b;
}

Interval mu_range(const DomainBox& box) { return {box.axes[0].lo + box.axes[1].lo, box.axes[0].hi + box.axes[1].hi}; }

Solution build_static(const FamilyOptions& opt) {
  auto gamma = Map::generic([](const auto& x) { return Arr3<std::decay_t<decltype(x[0])>>{x[1], x[2], x[3]}; });
  return assemble("static", gamma, ScalarFn2::constant(1.0), opt);
}

Solution build_field_aligned(const VectorFn3& tau, const FamilyOptions& opt) {
  double worst = -1.0;
  std::array<double, 3> at{};
  for_each_sample(opt.box, opt.check_points, [&](double mu, double x2, double x3) {
    const Arr3<Jet> a{Jet::variable(mu, 1), Jet::variable(x2, 2), Jet::variable(x3, 3)};
    Mat3 J;
    for (int i = 0; i < 3; ++i) {
      const Jet c = tau[i](a);
      for (int j = 0; j < 3; ++j) J(i, j) = c.d[j + 1];
    }
    const double err = std::abs(J.determinant() - 1.0);
    if (!(err <= worst)) {
      worst = err;
      at = {mu, x2, x3};
    }
  });
  if (!(worst <= opt.check_tolerance))
    throw FamilyError(fmt::format("family field_aligned: det(d tau) differs from 1 by {:.3e} at mu = {}, xi2 = {}, xi3 = {}",
                                  worst, at[0], at[1], at[2]));
  auto gamma = Map::generic([tau](const auto& x) {
    using T = std::decay_t<decltype(x[0])>;
    const Arr3<T> a{x[0] + x[1], x[2], x[3]};
    return Arr3<T>{tau[0](a), tau[1](a), tau[2](a)};
  });
  return assemble("field_aligned", gamma, ScalarFn2::constant(1.0), opt);
}

Solution build_dim3(const Dim3Params& p, const FamilyOptions& opt, const ScalarFn2* f) {
  ScalarFn2 cauchy;
  if (f) {
    cauchy = *f;
  } else {
    const double mu_ref = reference_mu(opt.box);
    cauchy = ScalarFn2::values_only([p, mu_ref](const ScalarFn2::Args& x) { return dim3_product(p, mu_ref, x[0], x[1]); },
                                    "tau3' d(tau1,tau2)/d(xi2,xi3)");
  }
  check_cauchy_product("dim3", opt.box, opt, cauchy,
                       [&](double mu, double x2, double x3) { return dim3_product(p, mu, x2, x3); });
  auto gamma = Map::generic([p](const auto& x) {
    using T = std::decay_t<decltype(x[0])>;
    const T mu = x[0] + x[1], s = x[0] - x[1];
    const Arr3<T> a{mu, x[2], x[3]};
    return Arr3<T>{p.u1(s) + p.tau1(a), p.u2(s) + p.tau2(a), p.tau3(mu)};
  });
  return assemble("dim3", gamma, cauchy, opt);
}

ScalarFn1 integrate_reciprocal(const ScalarFn1& alpha, const ScalarFn1& beta, double lo, double hi, int nodes,
                               double tolerance) {
  if (!(lo < hi) || nodes < 2) throw FamilyError("quadrature range must satisfy lo < hi");
  if (alpha.constant_value() && beta.constant_value()) {
    const double c = *alpha.constant_value() * *beta.constant_value();
    if (c == 0.0) throw FamilyError("alpha or beta vanishes");
    return ScalarFn1::generic([c](const auto& x) { return x[0] / c; }, fmt::format("mu/{}", c));
  }
  auto table = std::make_shared<ReciprocalTable>();
  table->alpha = alpha;
  table->beta = beta;
  table->lo = lo;
  table->tolerance = tolerance;
  table->step = (hi - lo) / nodes;
  table->value.resize(static_cast<std::size_t>(nodes) + 1);
  table->slope.resize(table->value.size());
  double sign = 0.0;
  for (std::size_t i = 0; i < table->value.size(); ++i) {
    const double x = lo + table->step * static_cast<double>(i);
    const double ab = alpha(x) * beta(x);
    if (!std::isfinite(ab) || ab == 0.0 || (sign != 0.0 && ab * sign < 0.0))
      throw FamilyError(fmt::format("alpha or beta vanishes near mu = {}", x));
    sign = ab > 0.0 ? 1.0 : -1.0;
    table->slope[i] = 1.0 / ab;
  }
  const Simpson simpson([&table](double x) { return table->g(x); }, tolerance);
  // tau3(0) = 0.
  table->value[0] = simpson.integrate(0.0, lo);
  for (std::size_t i = 1; i < table->value.size(); ++i) {
    const double a = lo + table->step * static_cast<double>(i - 1);
    table->value[i] = table->value[i - 1] + simpson.integrate(a, a + table->step);
  }
  std::shared_ptr<const ReciprocalTable> shared = table;
  // Jet path: table value with the exact integrand as derivative.
  struct Impl {
    std::shared_ptr<const ReciprocalTable> t;
    double operator()(const std::array<double, 1>& x) const { return t->eval(x[0]); }
    Jet operator()(const std::array<Jet, 1>& x) const {
      const Jet m = Jet::variable(x[0].v, 0);
      const Jet g = 1.0 / (t->alpha(m) * t->beta(m));
      return chain(x[0], t->eval(x[0].v), g.v, g.d[0]);
    }
  };
  return ScalarFn1::generic(Impl{shared}, "int dmu/(alpha beta)");
}

Solution build_jet(const JetParams& p, const FamilyOptions& opt) {
  const Interval mu = mu_range(opt.box);
  const ScalarFn1 tau3 = integrate_reciprocal(p.alpha, p.beta, mu.lo - 0.5, mu.hi + 0.5);
  Dim3Params d;
  d.tau3 = tau3;
  d.u1 = p.u1;
  d.u2 = p.u2;
  d.tau1 = ScalarFn3::generic(
      [p](const auto& x) {
        using T = std::decay_t<decltype(x[0])>;
        using std::cos, std::sin;
        const std::array<T, 2> ab{x[1], x[2]};
        const T ph = p.phi(x[0]);
        return p.a(x[0]) + p.alpha(x[0]) * (p.A(ab) * cos(ph) + p.B(ab) * sin(ph));
      },
      "a + alpha (A cos phi + B sin phi)");
  d.tau2 = ScalarFn3::generic(
      [p](const auto& x) {
        using T = std::decay_t<decltype(x[0])>;
        using std::cos, std::sin;
        const std::array<T, 2> ab{x[1], x[2]};
        const T ph = p.phi(x[0]);
        return p.b(x[0]) - p.beta(x[0]) * (p.A(ab) * sin(ph) - p.B(ab) * cos(ph));
      },
      "b - beta (A sin phi - B cos phi)");
  const ScalarFn2 f = ScalarFn2::values_only(
      [p](const ScalarFn2::Args& x) {
        const std::array<Jet, 2> a{Jet::variable(x[0], 0), Jet::variable(x[1], 1)};
        const Jet A = p.A(a), B = p.B(a);
        return A.d[0] * B.d[1] - A.d[1] * B.d[0];
      },
      "d(A,B)/d(xi2,xi3)");
  Solution s = build_dim3(d, opt, &f);
  s.family = "jet";
  return s;
}

Solution build_dim2(const Dim2Params& p, const FamilyOptions& opt, const ScalarFn2* f) {
  ScalarFn2 cauchy;
  if (f) {
    cauchy = *f;
  } else {
    const double mu_ref = reference_mu(opt.box);
    cauchy = ScalarFn2::values_only([p, mu_ref](const ScalarFn2::Args& x) { return dim2_product(p, mu_ref, x[0], x[1]); },
                                    "Jacobian product");
  }
  check_cauchy_product("dim2", opt.box, opt, cauchy,
                       [&](double mu, double x2, double x3) { return dim2_product(p, mu, x2, x3); });
  auto gamma = Map::generic([p](const auto& x) {
    using T = std::decay_t<decltype(x[0])>;
    const T mu = x[0] + x[1], s = x[0] - x[1];
    const Arr3<T> a{mu, x[2], x[3]};
    const std::array<T, 2> ml{mu, p.lambda(a)};
    return Arr3<T>{p.u(s) + p.tau1(a), p.tau2(ml), p.tau3(ml)};
  });
  return assemble("dim2", gamma, cauchy, opt);
}

Dim2Params torus_knot_as_dim2(const TorusKnotParams& p) {
  Dim2Params d;
  d.u = p.u;
  d.tau1 = ScalarFn3::generic(
      [p](const auto& x) {
        using T = std::decay_t<decltype(x[0])>;
        using std::sin;
        const std::array<T, 2> ab{x[1], x[2]};
        return p.a(x[0]) + p.B(ab) * sin(p.phi(x[0]) + p.A(ab));
      },
      "a + B sin(phi + A)");
  d.lambda = ScalarFn3::generic(
      [p](const auto& x) {
        using T = std::decay_t<decltype(x[0])>;
        const std::array<T, 2> ab{x[1], x[2]};
        using std::cos, std::sqrt;
        return sqrt(p.b(x[0]) + p.B(ab) * cos(p.phi(x[0]) + p.A(ab)));
      },
      "sqrt(b + B cos(phi + A))");
  const double k = p.k;
  d.tau2 = ScalarFn2::generic([k](const auto& x) {
    using std::cos;
    return x[1] * cos(k * x[0]);
  }, "lambda cos(k mu)");
  d.tau3 = ScalarFn2::generic([k](const auto& x) {
    using std::sin;
    return x[1] * sin(k * x[0]);
  }, "lambda sin(k mu)");
  return d;
}

Solution build_torus_knot(const TorusKnotParams& p, const FamilyOptions& opt) {
  if (p.k == 0.0) throw FamilyError("torus_knot: k must be nonzero");
  double worst = std::numeric_limits<double>::infinity();
  std::array<double, 3> at{};
  for_each_sample(opt.box, opt.check_points, [&](double mu, double x2, double x3) {
    const double margin = p.b(mu) - std::abs(p.B(ScalarFn2::Args{x2, x3}));
    if (!(margin >= worst)) {
      worst = margin;
      at = {mu, x2, x3};
    }
  });
  if (!(worst >= p.delta))
    throw FamilyError(fmt::format("torus_knot: b - |B| = {:.3e} below the margin {} at mu = {}, xi2 = {}, xi3 = {}",
                                  worst, p.delta, at[0], at[1], at[2]));
  const double k = p.k;
  const ScalarFn2 A = p.A, B = p.B;
  const ScalarFn2 f = ScalarFn2::values_only(
      [k, A, B](const ScalarFn2::Args& x) {
        const std::array<Jet, 2> a{Jet::variable(x[0], 0), Jet::variable(x[1], 1)};
        const Jet Aj = A(a), Bj = B(a);
        return 0.5 * k * Bj.v * (Aj.d[0] * Bj.d[1] - Aj.d[1] * Bj.d[0]);
      },
      "(k B / 2) d(A,B)/d(xi2,xi3)");
  Solution s = build_dim2(torus_knot_as_dim2(p), opt, &f);
  s.family = "torus_knot";
  return s;
}

TorusKnotParams sol13_params() {
  TorusKnotParams p;
  p.A = ScalarFn2::parse("xi2", {"xi2", "xi3"});
  p.B = ScalarFn2::parse("xi3", {"xi2", "xi3"});
  p.phi = ScalarFn1::parse("3*mu", {"mu"});
  p.a = ScalarFn1::parse("0", {"mu"});
  p.b = ScalarFn1::parse("2", {"mu"});
  p.k = 2.0;
  return p;
}

TorusKnotParams sol14_params() {
  TorusKnotParams p = sol13_params();
  p.a = ScalarFn1::parse("sin(3*mu)", {"mu"});
  p.b = ScalarFn1::parse("3 + cos(3*mu)", {"mu"});
  return p;
}

}  // namespace mhdnat
