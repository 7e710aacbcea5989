#include "mhdnat/symmetry.hpp"

#include <cmath>

#include <Eigen/Geometry>
#include <fmt/format.h>

namespace mhdnat {

namespace {

template <class T>
using Arr4 = std::array<T, 4>;

template <int N>
std::array<double, N> call(const Field<N>& f, const Arr4<double>& x) {
  return f(Point4{x[0], x[1], x[2], x[3]});
}
template <int N>
std::array<Jet, N> call(const Field<N>& f, const Arr4<Jet>& x) {
  return f(x);
}

// Builds a field from a generic callable; the jet path is kept only when
// every field it reads carries jets.
template <int N, class F>
Field<N> make_field(F f, bool jets, const DomainBox& box) {
  typename Field<N>::JetFn jet;
  if (jets) jet = [f](const Arr4<Jet>& x) -> std::array<Jet, N> { return f(x); };
  return Field<N>([f](const Point4& p) -> std::array<double, N> { return f(p.array()); }, jet, box);
}

template <int N, class Sub>
Field<N> substitute(const Field<N>& field, Sub sub, const DomainBox& box) {
  return make_field<N>([field, sub](const auto& x) { return call(field, sub(x)); }, field.has_jet(), box);
}

// Re-expresses every field of the solution in new coordinates: new(x) = old(sub(x)).
template <class Sub>
Solution remap(const Solution& sol, Sub sub, const DomainBox& box) {
  Solution out = sol;
  out.gamma = substitute(sol.gamma, sub, box);
  if (const auto* r = std::get_if<ScalarField>(&sol.density)) out.density = substitute(*r, sub, box);
  if (const auto* tp = std::get_if<TotalPressure>(&sol.pressure)) {
    out.pressure = TotalPressure{substitute(tp->P, sub, box)};
  } else {
    const auto& gp = std::get<GasPressure>(sol.pressure);
    GasPressure ng;
    ng.p = substitute(gp.p, sub, box);
    if (gp.P) ng.P = substitute(*gp.P, sub, box);
    if (gp.entropy) ng.entropy = substitute(*gp.entropy, sub, box);
    out.pressure = ng;
  }
  out.domain = box;
  return out;
}

Interval scale(const Interval& iv, double s) {
  const double a = iv.lo * s, b = iv.hi * s;
  return {std::min(a, b), std::max(a, b)};
}

// Maps the value of a scalar field through g(x, old_value).
template <class G>
ScalarField map_scalar(const ScalarField& field, G g, bool jets, const DomainBox& box) {
  return make_field<1>([field, g](const auto& x) { return std::array{g(x, call(field, x)[0])}; },
                       jets && field.has_jet(), box);
}

ScalarField& total_pressure(Solution& sol, const char* what) {
  if (auto* tp = std::get_if<TotalPressure>(&sol.pressure)) return tp->P;
  throw TransformError(fmt::format("{} applies to incompressible (total-pressure) solutions only", what));
}

template <class T>
std::array<T, 2> eta_of(const ScalarFn2& eta2, const ScalarFn2& eta3, const T& x2, const T& x3) {
  const std::array<T, 2> a{x2, x3};
  return {eta2(a), eta3(a)};
}

double eta_jacobian(const ScalarFn2& eta2, const ScalarFn2& eta3, double x2, double x3) {
  const std::array<Jet, 2> a{Jet::variable(x2, 0), Jet::variable(x3, 1)};
  const Jet e2 = eta2(a), e3 = eta3(a);
  return e2.d[0] * e3.d[1] - e2.d[1] * e3.d[0];
}

// Samples the Jacobian of the substitution over the (xi2', xi3') box.
template <class Check>
void sample_eta(const ScalarFn2& eta2, const ScalarFn2& eta3, const DomainBox& box, Check&& check) {
  const int n = 9;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double x2 = box.axes[2].lo + (box.axes[2].hi - box.axes[2].lo) * i / (n - 1);
      const double x3 = box.axes[3].lo + (box.axes[3].hi - box.axes[3].lo) * j / (n - 1);
      check(x2, x3, eta_jacobian(eta2, eta3, x2, x3));
    }
  }
}

ScalarFn2 pulled_back_f(const ScalarFn2& f, const ScalarFn2& eta2, const ScalarFn2& eta3) {
  return ScalarFn2::values_only(
      [f, eta2, eta3](const ScalarFn2::Args& x) {
        const auto e = eta_of(eta2, eta3, x[0], x[1]);
        return f(ScalarFn2::Args{e[0], e[1]}) * eta_jacobian(eta2, eta3, x[0], x[1]);
      },
      "f(eta) d(eta2,eta3)/d(xi2,xi3)");
}

struct Applier {
  const Solution& sol;

  Solution operator()(const TimeShift& tr) const {
    const double dt = tr.dt;
    DomainBox box = sol.domain;
    box.axes[0] = {box.axes[0].lo + dt, box.axes[0].hi + dt};
    auto sub = [dt](const auto& x) {
      auto y = x;
      y[0] = x[0] - dt;
      return y;
    };
    Solution out = remap(sol, sub, box);
    out.family = sol.family + "|time_shift";
    return out;
  }

  Solution operator()(const Rotation& tr) const {
    if (!(tr.axis.norm() > 0.0)) throw TransformError("rotation axis must be nonzero");
    const Mat3 R = Eigen::AngleAxisd(tr.angle, tr.axis.normalized()).toRotationMatrix();
    Solution out = sol;
    const Map g = sol.gamma;
    out.gamma = make_field<3>(
        [g, R](const auto& x) {
          const auto v = call(g, x);
          using T = std::decay_t<decltype(v[0])>;
          std::array<T, 3> r;
          for (int i = 0; i < 3; ++i) r[i] = R(i, 0) * v[0] + R(i, 1) * v[1] + R(i, 2) * v[2];
          return r;
        },
        g.has_jet(), sol.domain);
    out.family = sol.family + "|rotation";
    return out;
  }

  Solution operator()(const Dilation1& tr) const {
    total_pressure(const_cast<Solution&>(sol), "dilation1");
    const double s = std::exp(tr.eps), inv = 1.0 / s;
    DomainBox box;
    for (int a = 0; a < 4; ++a) box.axes[a] = scale(sol.domain.axes[a], s);
    auto sub = [inv](const auto& x) {
      auto y = x;
      for (auto& c : y) c = c * inv;
      return y;
    };
    Solution out = remap(sol, sub, box);
    const Map g = out.gamma;
    out.gamma = make_field<3>(
        [g, s](const auto& x) {
          auto v = call(g, x);
          for (auto& c : v) c = c * s;
          return v;
        },
        g.has_jet(), box);
    const ScalarFn2 f = sol.f;
    out.f = ScalarFn2::values_only([f, inv](const ScalarFn2::Args& x) { return f(ScalarFn2::Args{x[0] * inv, x[1] * inv}); },
                                   "f(e^-eps xi)");
    out.family = sol.family + "|dilation1";
    return out;
  }

  Solution operator()(const Dilation2& tr) const {
    total_pressure(const_cast<Solution&>(sol), "dilation2");
    if (!sol.constant_density()) throw TransformError("dilation2 needs a constant density");
    const double s2 = std::exp(2.0 * tr.eps), s3 = std::exp(3.0 * tr.eps), s4 = std::exp(4.0 * tr.eps);
    const double inv3 = 1.0 / s3;
    DomainBox box = sol.domain;
    box.axes[2] = scale(box.axes[2], s3);
    box.axes[3] = scale(box.axes[3], s3);
    auto sub = [inv3](const auto& x) {
      auto y = x;
      y[2] = x[2] * inv3;
      y[3] = x[3] * inv3;
      return y;
    };
    Solution out = remap(sol, sub, box);
    const Map g = out.gamma;
    out.gamma = make_field<3>(
        [g, s2](const auto& x) {
          auto v = call(g, x);
          for (auto& c : v) c = c * s2;
          return v;
        },
        g.has_jet(), box);
    ScalarField& P = total_pressure(out, "dilation2");
    P = map_scalar(P, [s4](const auto&, const auto& v) { return v * s4; }, true, box);
    const ScalarFn2 f = sol.f;
    out.f = ScalarFn2::values_only(
        [f, inv3](const ScalarFn2::Args& x) { return f(ScalarFn2::Args{x[0] * inv3, x[1] * inv3}); }, "f(e^-3eps xi)");
    out.family = sol.family + "|dilation2";
    return out;
  }

  Solution operator()(const GeneralizedGalilean& tr) const {
    std::array<ScalarFn1, 3> acc;
    for (int i = 0; i < 3; ++i) acc[i] = tr.alpha[i].derivative(0).derivative(0);
    const auto alpha = tr.alpha;
    Solution out = sol;
    const Map g = sol.gamma;
    bool jets = g.has_jet();
    for (int i = 0; i < 3; ++i) jets = jets && alpha[i].has_jet() && acc[i].has_jet();
    out.gamma = make_field<3>(
        [g, alpha](const auto& x) {
          auto v = call(g, x);
          for (int i = 0; i < 3; ++i) v[i] = v[i] + alpha[i](x[0]);
          return v;
        },
        jets, sol.domain);
    if (sol.compressible()) {
      // Only the extended Galilean kernel (alpha'' = 0) survives compressibility.
      const Interval tr_t = sol.domain.axes[0];
      for (int k = 0; k <= 8; ++k) {
        const double t = tr_t.bounded() ? tr_t.lo + (tr_t.hi - tr_t.lo) * k / 8.0 : k - 4.0;
        for (int i = 0; i < 3; ++i)
          if (std::abs(acc[i](t)) > 1e-12)
            throw TransformError("compressible solutions admit only Galilean boosts with alpha'' = 0");
      }
      out.family = sol.family + "|galilean";
      return out;
    }
    const double rho0 = sol.rho0();
    ScalarField& P = total_pressure(out, "galilean");
    const ScalarField P0 = P;
    P = make_field<1>(
        [P0, g, alpha, acc, rho0](const auto& x) {
          const auto v = call(g, x);
          auto p = call(P0, x)[0];
          for (int i = 0; i < 3; ++i) {
            const auto a2 = acc[i](x[0]);
            p = p - rho0 * (v[i] * a2 + 0.5 * alpha[i](x[0]) * a2);
          }
          return std::array{p};
        },
        jets && P0.has_jet(), sol.domain);
    out.family = sol.family + "|galilean";
    return out;
  }

  Solution operator()(const PressureShift& tr) const {
    Solution out = sol;
    ScalarField& P = total_pressure(out, "pressure_shift");
    const ScalarFn1 beta = tr.beta;
    P = map_scalar(P, [beta](const auto& x, const auto& v) { return v + beta(x[0]); }, beta.has_jet(), sol.domain);
    out.family = sol.family + "|pressure_shift";
    return out;
  }

  Solution operator()(const Reparametrization& tr) const {
    const DomainBox box = tr.box.value_or(sol.domain);
    double worst = 0.0;
    sample_eta(tr.eta2, tr.eta3, box, [&](double, double, double d) { worst = std::max(worst, std::abs(d - 1.0)); });
    if (!(worst <= 1e-10))
      throw TransformError(fmt::format("reparametrization Jacobian differs from 1 by {:.3e}", worst));
    const ScalarFn2 a = tr.a, e2 = tr.eta2, e3 = tr.eta3;
    auto sub = [a, e2, e3](const auto& x) {
      using T = std::decay_t<decltype(x[0])>;
      const std::array<T, 2> q{x[2], x[3]};
      return Arr4<T>{x[0], x[1] + a(q), e2(q), e3(q)};
    };
    Solution out = remap(sol, sub, box);
    out.f = pulled_back_f(sol.f, e2, e3);
    out.family = sol.family + "|reparametrization";
    return out;
  }

  Solution operator()(const CauchyEquivalence& tr) const {
    const DomainBox box = tr.box.value_or(sol.domain);
    double smallest = std::numeric_limits<double>::infinity();
    sample_eta(tr.eta2, tr.eta3, box, [&](double, double, double d) { smallest = std::min(smallest, std::abs(d)); });
    if (!(smallest > 1e-12)) throw TransformError("Cauchy equivalence Jacobian vanishes on the domain");
    const ScalarFn2 e2 = tr.eta2, e3 = tr.eta3;
    auto sub = [e2, e3](const auto& x) {
      using T = std::decay_t<decltype(x[0])>;
      const std::array<T, 2> q{x[2], x[3]};
      return Arr4<T>{x[0], x[1], e2(q), e3(q)};
    };
    Solution out = remap(sol, sub, box);
    out.f = pulled_back_f(sol.f, e2, e3);
    out.family = sol.family + "|cauchy_equivalence";
    return out;
  }
};

}  // namespace

Solution apply(const Transform& tr, const Solution& sol) { return std::visit(Applier{sol}, tr); }

Solution Pipeline::operator()(const Solution& sol) const {
  Solution out = sol;
  for (const auto& step : steps_) out = mhdnat::apply(step, out);
  return out;
}

Pipeline Pipeline::then(const Pipeline& next) const {
  std::vector<Transform> all = steps_;
  all.insert(all.end(), next.steps_.begin(), next.steps_.end());
  return Pipeline(std::move(all));
}

Pipeline compose(std::vector<Transform> trs) {
  if (trs.empty()) throw TransformError("transform list must be nonempty");
  return Pipeline(std::move(trs));
}

std::string name_of(const Transform& tr) {
  static const char* names[] = {"time_shift", "rotation",       "dilation1",         "dilation2",
                                "galilean",   "pressure_shift", "reparametrization", "cauchy_equivalence"};
  return names[tr.index()];
}

void CompressibleEquivalence::validate() const {
  if (alpha == 0.0 || beta == 0.0 || !std::isfinite(alpha) || !std::isfinite(beta) || !std::isfinite(kappa))
    throw TransformError("equivalence constants alpha and beta must be finite and nonzero");
}
double CompressibleEquivalence::pressure_scale() const { return std::pow(alpha, -8) * std::pow(beta, 4); }
double CompressibleEquivalence::density_scale() const { return std::pow(alpha, -6); }
double CompressibleEquivalence::time_scale() const { return std::pow(alpha, 3); }
double CompressibleEquivalence::xi1_scale() const { return 1.0; }
double CompressibleEquivalence::xi_scale() const { return std::pow(beta, 3); }
double CompressibleEquivalence::gamma_scale() const { return alpha * alpha * beta * beta; }

StateFunction apply_equiv_h(const CompressibleEquivalence& tr, const StateFunction& h) {
  tr.validate();
  const double outer = std::pow(tr.alpha, -2) * std::pow(tr.beta, 4);
  const double ps = std::pow(tr.alpha, 8) * std::pow(tr.beta, -4);
  const double rs = std::pow(tr.alpha, 6);
  const double kappa = tr.kappa;
  const StateFunction base = h;
  // Validity box of the image: p' = p / ps + kappa, rho' = rho / rs.
  Interval pd = scale(h.p_domain(), 1.0 / ps);
  pd = {pd.lo + kappa, pd.hi + kappa};
  const Interval rd = scale(h.rho_domain(), 1.0 / rs);
  return StateFunction([base, outer, ps, rs, kappa](const Jet& p, const Jet& rho) {
    return outer * base(ps * (p - kappa), rs * rho);
  },
                       fmt::format("equiv[{}, {}, {}]({})", tr.alpha, tr.beta, tr.kappa, h.label()), pd, rd);
}

Solution apply_equiv(const CompressibleEquivalence& tr, const Solution& sol) {
  tr.validate();
  if (!sol.compressible()) throw TransformError("compressible equivalence needs a gas-pressure solution");
  const double T = tr.time_scale(), X1 = tr.xi1_scale(), X = tr.xi_scale(), G = tr.gamma_scale();
  const double R = tr.density_scale(), Pi = tr.pressure_scale(), kappa = tr.kappa;
  DomainBox box;
  box.axes = {scale(sol.domain.axes[0], T), scale(sol.domain.axes[1], X1), scale(sol.domain.axes[2], X),
              scale(sol.domain.axes[3], X)};
  auto sub = [T, X1, X](const auto& x) {
    auto y = x;
    y[0] = x[0] / T;
    y[1] = x[1] / X1;
    y[2] = x[2] / X;
    y[3] = x[3] / X;
    return y;
  };
  Solution out = remap(sol, sub, box);
  const Map g = out.gamma;
  out.gamma = make_field<3>(
      [g, G](const auto& x) {
        auto v = call(g, x);
        for (auto& c : v) c = c * G;
        return v;
      },
      g.has_jet(), box);
  if (const double* r = std::get_if<double>(&out.density))
    out.density = *r * R;
  else
    out.density = map_scalar(std::get<ScalarField>(out.density), [R](const auto&, const auto& v) { return v * R; }, true, box);
  auto& gp = std::get<GasPressure>(out.pressure);
  auto affine = [Pi, kappa](const auto&, const auto& v) { return v * Pi + kappa; };
  gp.p = map_scalar(gp.p, affine, true, box);
  if (gp.P) gp.P = map_scalar(*gp.P, affine, true, box);
  // R G^3 / (X1 X^2) = 1, so f is carried over unchanged in value.
  const double fs = R * G * G * G / (X1 * X * X);
  const ScalarFn2 f = sol.f;
  out.f = ScalarFn2::values_only([f, X, fs](const ScalarFn2::Args& x) { return fs * f(ScalarFn2::Args{x[0] / X, x[1] / X}); },
                                 "f(xi / beta^3)");
  if (sol.h) out.h = apply_equiv_h(tr, *sol.h);
  out.family = sol.family + "|equivalence";
  return out;
}

}  // namespace mhdnat
