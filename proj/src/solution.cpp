#include "mhdnat/solution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

namespace mhdnat {

double Solution::rho0() const {
  if (const double* r = std::get_if<double>(&density)) return *r;
  throw std::invalid_argument("solution " + family + " has a non-constant density");
}

void Solution::set_domain(const DomainBox& box) {
  domain = box;
  gamma = gamma.with_domain(box);
  if (auto* r = std::get_if<ScalarField>(&density)) *r = r->with_domain(box);
  if (auto* tp = std::get_if<TotalPressure>(&pressure)) {
    tp->P = tp->P.with_domain(box);
  } else {
    auto& gp = std::get<GasPressure>(pressure);
    gp.p = gp.p.with_domain(box);
    if (gp.P) gp.P = gp.P->with_domain(box);
    if (gp.entropy) gp.entropy = gp.entropy->with_domain(box);
  }
}

namespace {

struct ScalarDerivs {
  double value = 0.0;
  std::array<double, 4> d{};
};

ScalarDerivs scalar_derivs(const ScalarField& f, const Point4& at, const DiffOptions& opt) {
  const auto d = derivatives(f, at, opt, kNoSecond);
  ScalarDerivs s;
  s.value = d.value[0];
  for (int a = 0; a < 4; ++a) s.d[a] = d.d1[a][0];
  return s;
}

ScalarDerivs density_derivs(const Solution& sol, const Point4& at) {
  if (const double* r = std::get_if<double>(&sol.density)) return {*r, {}};
  return scalar_derivs(std::get<ScalarField>(sol.density), at, sol.diff);
}

// Total pressure and its gradient; needs the (1, alpha) second derivatives of
// gamma when P is derived from the gas pressure.
ScalarDerivs total_pressure_derivs(const Solution& sol, const Point4& at, const FieldDerivs<3>& g,
                                   const ScalarDerivs& rho) {
  if (const auto* tp = std::get_if<TotalPressure>(&sol.pressure)) return scalar_derivs(tp->P, at, sol.diff);
  const auto& gp = std::get<GasPressure>(sol.pressure);
  if (gp.P) return scalar_derivs(*gp.P, at, sol.diff);
  const ScalarDerivs p = scalar_derivs(gp.p, at, sol.diff);
  const Vec3 b = vec(g.d1[1]);
  ScalarDerivs P;
  P.value = p.value + 0.5 * rho.value * rho.value * b.squaredNorm();
  for (int a = 0; a < 4; ++a)
    P.d[a] = p.d[a] + rho.value * rho.d[a] * b.squaredNorm() + rho.value * rho.value * b.dot(vec(g.d2[1][a]));
  return P;
}

unsigned pressure_mask(const Solution& sol) {
  if (const auto* gp = std::get_if<GasPressure>(&sol.pressure); gp && !gp->P)
    return second_bit(1, 0) | second_bit(1, 1) | second_bit(1, 2) | second_bit(1, 3);
  return kNoSecond;
}

// Pressure gradient term J^{-T} grad_xi P written with cross products of the
// coordinate vectors, divided by det J.
Vec3 pressure_force(const FieldDerivs<3>& g, const std::array<double, 4>& dP, double det) {
  const Vec3 g1 = vec(g.d1[1]), g2 = vec(g.d1[2]), g3 = vec(g.d1[3]);
  return (dP[1] * g2.cross(g3) + dP[2] * g3.cross(g1) + dP[3] * g1.cross(g2)) / det;
}

ResidualReport reduce(const std::string& check, const std::vector<std::string>& names, const SweepResult& r,
                      const GridSpec& grid, const Solution& sol, const CheckOptions& opt) {
  ResidualReport rep;
  rep.check = check;
  rep.points = r.points();
  rep.tolerance = opt.tolerance;
  rep.mode = sol.diff.mode;
  rep.stencil = sol.diff.stencil;
  rep.equations.resize(names.size());
  std::vector<double> sumsq(names.size(), 0.0);
  std::vector<std::size_t> worst(names.size(), 0);
  bool nonfinite = false;
  bool first_included = true;
  for (std::size_t e = 0; e < names.size(); ++e) rep.equations[e].name = names[e];
  for (std::size_t i = 0; i < r.points(); ++i) {
    if (r.excluded[i]) {
      ++rep.excluded;
      continue;
    }
    const double* row = r.row(i);
    for (std::size_t e = 0; e < names.size(); ++e) {
      double v = std::abs(row[e]);
      if (!std::isfinite(v)) {
        nonfinite = true;
        v = std::numeric_limits<double>::infinity();
      }
      sumsq[e] += v * v;
      if (first_included || v > rep.equations[e].max_norm) {
        rep.equations[e].max_norm = v;
        worst[e] = i;
      }
    }
    first_included = false;
  }
  const std::size_t included = rep.points - rep.excluded;
  for (std::size_t e = 0; e < names.size(); ++e) {
    rep.equations[e].l2_norm = included ? std::sqrt(sumsq[e] / static_cast<double>(included)) : 0.0;
    rep.equations[e].worst = grid.point(worst[e]);
  }
  if (sol.diff.mode == DerivativeMode::closed_form && !sol.gamma.has_jet())
    rep.notes.push_back("map has no closed-form derivatives; finite differences used");
  if (sol.constant_density() && sol.rho0() != 1.0 && !sol.compressible())
    rep.notes.push_back(fmt::format("constant density rho0 = {} carried through the momentum scaling", sol.rho0()));
  if (nonfinite) rep.notes.push_back("non-finite residual values encountered");
  const double excluded_fraction = rep.points ? static_cast<double>(rep.excluded) / static_cast<double>(rep.points) : 0.0;
  if (rep.excluded) rep.notes.push_back(fmt::format("{} singular points excluded", rep.excluded));
  rep.passed = !nonfinite && included > 0 && excluded_fraction <= opt.max_excluded_fraction &&
               rep.max_norm() <= opt.tolerance;
  return rep;
}

void check_grid(const Solution& sol, const GridSpec& grid) { grid.validate(sol.domain); }

}  // namespace

double ResidualReport::max_norm() const {
  double m = 0.0;
  for (const auto& e : equations) m = std::max(m, e.max_norm);
  return m;
}

const EquationNorm& ResidualReport::equation(const std::string& name) const {
  for (const auto& e : equations)
    if (e.name == name) return e;
  throw std::out_of_range("report " + check + " has no equation " + name);
}

nlohmann::json ResidualReport::to_json() const {
  nlohmann::json j;
  j["check"] = check;
  j["passed"] = passed;
  j["tolerance"] = tolerance;
  j["points"] = points;
  j["excluded"] = excluded;
  j["derivatives"] = {{"mode", to_string(mode)},
                      {"order", stencil.order},
                      {"step", stencil.step},
                      {"richardson", stencil.richardson}};
  auto eqs = nlohmann::json::array();
  for (const auto& e : equations) {
    eqs.push_back({{"name", e.name},
                   {"max", e.max_norm},
                   {"l2", e.l2_norm},
                   {"worst", {e.worst.t, e.worst.xi1, e.worst.xi2, e.worst.xi3}}});
  }
  j["equations"] = eqs;
  j["max"] = max_norm();
  j["notes"] = notes;
  return j;
}

EulerianState eulerian_fields(const Solution& sol, const Point4& at) {
  if (!sol.domain.contains(at))
    throw DomainError(fmt::format("point ({}, {}, {}, {}) outside the domain of {}", at.t, at.xi1, at.xi2, at.xi3,
                                  sol.family));
  const auto g = derivatives(sol.gamma, at, sol.diff, kNoSecond);
  const ScalarDerivs rho = density_derivs(sol, at);
  EulerianState s;
  s.x = vec(g.value);
  s.u = vec(g.d1[0]);
  s.b = vec(g.d1[1]);
  s.rho = rho.value;
  s.B = s.rho * s.b;
  if (const auto* tp = std::get_if<TotalPressure>(&sol.pressure)) {
    s.P = tp->P(at)[0];
    s.p = s.P - 0.5 * s.B.squaredNorm();
  } else {
    const auto& gp = std::get<GasPressure>(sol.pressure);
    s.p = gp.p(at)[0];
    s.P = gp.P ? (*gp.P)(at)[0] : s.p + 0.5 * s.B.squaredNorm();
  }
  return s;
}

ResidualReport residual_incompressible(const Solution& sol, const GridSpec& grid, const CheckOptions& opt) {
  check_grid(sol, grid);
  if (sol.compressible()) throw std::invalid_argument("residual_incompressible needs a total-pressure solution");
  const double rho0 = sol.rho0();
  const unsigned mask = second_bit(0, 0) | second_bit(1, 1);
  const auto& P = std::get<TotalPressure>(sol.pressure).P;
  auto kernel = [&](const Point4& at, double* out) {
    const auto g = derivatives(sol.gamma, at, sol.diff, mask);
    const Mat3 J = spatial_jacobian(g);
    const double det = J.determinant();
    if (is_singular(J, det)) return false;
    const ScalarDerivs dP = scalar_derivs(P, at, sol.diff);
    const Vec3 m = vec(g.d2[0][0]) - rho0 * vec(g.d2[1][1]) + pressure_force(g, dP.d, det) / rho0;
    out[0] = m.norm();
    out[1] = rho0 * det - sol.f(ScalarFn2::Args{at.xi2, at.xi3});
    return true;
  };
  return reduce("incompressible", {"momentum", "constraint"}, sweep(grid, 2, kernel, opt.exec), grid, sol, opt);
}

ResidualReport residual_compressible(const Solution& sol, const StateFunction& h, const GridSpec& grid,
                                     const CheckOptions& opt) {
  check_grid(sol, grid);
  if (!sol.compressible()) throw std::invalid_argument("residual_compressible needs a gas-pressure solution");
  const auto& gp = std::get<GasPressure>(sol.pressure);
  const unsigned mask = second_bit(0, 0) | pressure_mask(sol) | second_bit(1, 0) | second_bit(1, 1) |
                        second_bit(1, 2) | second_bit(1, 3);
  auto kernel = [&](const Point4& at, double* out) {
    const auto g = derivatives(sol.gamma, at, sol.diff, mask);
    const Mat3 J = spatial_jacobian(g);
    const double det = J.determinant();
    if (is_singular(J, det)) return false;
    const ScalarDerivs rho = density_derivs(sol, at);
    const ScalarDerivs p = scalar_derivs(gp.p, at, sol.diff);
    const ScalarDerivs P = total_pressure_derivs(sol, at, g, rho);
    // d/dxi1 (rho gamma_1)
    const Vec3 flux = rho.d[1] * vec(g.d1[1]) + rho.value * vec(g.d2[1][1]);
    const Vec3 m = vec(g.d2[0][0]) - flux + pressure_force(g, P.d, det) / rho.value;
    const StateFunction::Partials hp = h.partials(p.value, rho.value);
    out[0] = m.norm();
    out[1] = rho.value * det - sol.f(ScalarFn2::Args{at.xi2, at.xi3});
    out[2] = p.d[0] - hp.h * rho.d[0];
    out[3] = P.value - (p.value + 0.5 * rho.value * rho.value * vec(g.d1[1]).squaredNorm());
    return true;
  };
  auto rep = reduce("compressible", {"momentum", "constraint", "state", "total_pressure"},
                    sweep(grid, 4, kernel, opt.exec), grid, sol, opt);
  if (!gp.P) rep.notes.push_back("total pressure derived from the gas pressure");
  rep.notes.push_back("state function h = " + h.label());
  return rep;
}

ResidualReport cauchy_check(const Solution& sol, const GridSpec& grid, const CheckOptions& opt) {
  check_grid(sol, grid);
  unsigned mask = 0;
  for (int i = 1; i <= 3; ++i) mask |= second_bit(0, i) | second_bit(1, i);
  auto kernel = [&](const Point4& at, double* out) {
    const auto g = derivatives(sol.gamma, at, sol.diff, mask);
    const Mat3 J = spatial_jacobian(g);
    const double det = J.determinant();
    if (is_singular(J, det)) return false;
    const ScalarDerivs rho = density_derivs(sol, at);
    out[0] = rho.value * det - sol.f(ScalarFn2::Args{at.xi2, at.xi3});
    for (int a = 0; a < 2; ++a) {
      // d det J / d xi^a by replacing one column at a time.
      double ddet = 0.0;
      for (int i = 0; i < 3; ++i) {
        Mat3 Ji = J;
        Ji.col(i) = vec(g.d2[a][i + 1]);
        ddet += Ji.determinant();
      }
      out[1 + a] = rho.d[a] * det + rho.value * ddet;
    }
    return true;
  };
  return reduce("cauchy", {"cauchy", "variation_t", "variation_xi1"}, sweep(grid, 3, kernel, opt.exec), grid, sol,
                opt);
}

ResidualReport eulerian_residual(const Solution& sol, const GridSpec& grid, const CheckOptions& opt) {
  check_grid(sol, grid);
  auto kernel = [&](const Point4& at, double* out) {
    const auto g = derivatives(sol.gamma, at, sol.diff);
    const Mat3 J = spatial_jacobian(g);
    const double det = J.determinant();
    if (is_singular(J, det)) return false;
    const Mat3 Jinv = J.inverse();
    const ScalarDerivs rho = density_derivs(sol, at);
    const ScalarDerivs P = total_pressure_derivs(sol, at, g, rho);

    const Vec3 u = vec(g.d1[0]);
    const Vec3 b = vec(g.d1[1]);
    const Vec3 B = rho.value * b;
    // xi-derivatives of u and B; columns are d/dxi^1..3.
    Mat3 du_xi, dB_xi;
    for (int i = 1; i <= 3; ++i) {
      du_xi.col(i - 1) = vec(g.d2[0][i]);
      dB_xi.col(i - 1) = rho.d[i] * b + rho.value * vec(g.d2[1][i]);
    }
    const Vec3 du_t = vec(g.d2[0][0]);
    const Vec3 dB_t = rho.d[0] * b + rho.value * vec(g.d2[1][0]);
    const Mat3 grad_u = du_xi * Jinv;  // (grad u)_jk = d u_j / d x_k
    const Mat3 grad_B = dB_xi * Jinv;
    const Vec3 grad_rho = Jinv.transpose() * Vec3(rho.d[1], rho.d[2], rho.d[3]);
    const Vec3 grad_P = Jinv.transpose() * Vec3(P.d[1], P.d[2], P.d[3]);

    const Vec3 u_t = du_t - grad_u * u;
    const Vec3 B_t = dB_t - grad_B * u;
    const double rho_t = rho.d[0] - grad_rho.dot(u);
    const double div_u = grad_u.trace();
    const double div_B = grad_B.trace();
    const Vec3 curl_B(grad_B(2, 1) - grad_B(1, 2), grad_B(0, 2) - grad_B(2, 0), grad_B(1, 0) - grad_B(0, 1));
    const Vec3 grad_p = grad_P - grad_B.transpose() * B;

    const double continuity = rho_t + u.dot(grad_rho) + rho.value * div_u;
    const Vec3 momentum = rho.value * (u_t + grad_u * u) + B.cross(curl_B) + grad_p;
    const Vec3 induction = B_t - (u * div_B - B * div_u + grad_u * B - grad_B * u);
    out[0] = continuity;
    out[1] = momentum.norm();
    out[2] = induction.norm();
    out[3] = div_B;
    return true;
  };
  return reduce("eulerian", {"continuity", "momentum", "induction", "divergence"}, sweep(grid, 4, kernel, opt.exec),
                grid, sol, opt);
}

ResidualReport wave_relation(const Solution& sol, const GridSpec& grid, const CheckOptions& opt) {
  check_grid(sol, grid);
  const unsigned mask = second_bit(0, 0) | second_bit(1, 1);
  auto kernel = [&](const Point4& at, double* out) {
    const auto g = derivatives(sol.gamma, at, sol.diff, mask);
    out[0] = (vec(g.d2[0][0]) - vec(g.d2[1][1])).norm();
    return true;
  };
  return reduce("wave", {"wave"}, sweep(grid, 1, kernel, opt.exec), grid, sol, opt);
}

Solution perturb(const Solution& sol, int component, const ScalarField& delta, double amplitude) {
  if (component < 0 || component > 2) throw std::invalid_argument("perturbed component must be 0, 1 or 2");
  Solution out = sol;
  const Map base = sol.gamma;
  Map::JetFn jet;
  if (base.has_jet() && delta.has_jet()) {
    jet = [base, delta, component, amplitude](const std::array<Jet, 4>& x) {
      auto v = base(x);
      v[component] += amplitude * delta(x)[0];
      return v;
    };
  }
  out.gamma = Map(
      [base, delta, component, amplitude](const Point4& p) {
        auto v = base(p);
        v[component] += amplitude * delta(p)[0];
        return v;
      },
      jet, base.domain());
  out.family = sol.family + "+perturbed";
  return out;
}

Solution perturb_pressure(const Solution& sol, const ScalarField& delta, double amplitude) {
  Solution out = sol;
  auto shifted = [&](const ScalarField& f) {
    ScalarField::JetFn jet;
    if (f.has_jet() && delta.has_jet())
      jet = [f, delta, amplitude](const std::array<Jet, 4>& x) {
        return std::array<Jet, 1>{f(x)[0] + amplitude * delta(x)[0]};
      };
    return ScalarField([f, delta, amplitude](const Point4& p) { return std::array<double, 1>{f(p)[0] + amplitude * delta(p)[0]}; },
                       jet, f.domain());
  };
  if (auto* tp = std::get_if<TotalPressure>(&out.pressure))
    tp->P = shifted(tp->P);
  else
    std::get<GasPressure>(out.pressure).p = shifted(std::get<GasPressure>(out.pressure).p);
  out.family = sol.family + "+pressure_perturbed";
  return out;
}

}  // namespace mhdnat
