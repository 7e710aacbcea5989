#include "mhdnat/fieldline.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>

#include <boost/numeric/odeint/stepper/generation.hpp>
#include <boost/numeric/odeint/stepper/runge_kutta4.hpp>
#include <boost/numeric/odeint/stepper/runge_kutta_dopri5.hpp>
#include <fmt/format.h>

#include "mhdnat/expression.hpp"

namespace mhdnat {

namespace odeint = boost::numeric::odeint;

bool contains(const Box3& box, const Vec3& x) {
  for (int i = 0; i < 3; ++i)
    if (!box[i].contains(x[i])) return false;
  return true;
}

namespace {

std::function<double(const Vec3&)> compile(const std::string& text) {
  const Expression e = Expression::parse(text, {"x", "y", "z"});
  return [e](const Vec3& x) {
    const double a[3] = {x[0], x[1], x[2]};
    return e.eval(std::span<const double>(a, 3));
  };
}

double node(const Interval& iv, int i, int n) { return iv.lo + (iv.hi - iv.lo) * (i + 0.5) / n; }

}  // namespace

EulerianInitialData EulerianInitialData::parse(const std::array<std::string, 3>& B0, const std::string& rho0,
                                               const std::array<std::string, 3>& u0, const Box3& domain) {
  std::array<std::function<double(const Vec3&)>, 3> b, u;
  for (int i = 0; i < 3; ++i) {
    b[i] = compile(B0[i]);
    u[i] = compile(u0[i].empty() ? "0" : u0[i]);
  }
  EulerianInitialData d;
  d.B0 = [b](const Vec3& x) { return Vec3(b[0](x), b[1](x), b[2](x)); };
  d.u0 = [u](const Vec3& x) { return Vec3(u[0](x), u[1](x), u[2](x)); };
  d.rho0 = compile(rho0);
  d.domain = domain;
  return d;
}

Vec3 EulerianInitialData::b0(const Vec3& x) const {
  const double r = rho0(x);
  if (!(r > 0.0)) throw FieldlineError(fmt::format("rho0 = {} is not positive at ({}, {}, {})", r, x[0], x[1], x[2]));
  return B0(x) / r;
}

double EulerianInitialData::max_divergence(int n) const {
  for (const auto& iv : domain)
    if (!iv.bounded()) throw std::invalid_argument("divergence check needs a bounded domain");
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const Vec3 x(node(domain[0], i, n), node(domain[1], j, n), node(domain[2], k, n));
        double div = 0.0;
        for (int a = 0; a < 3; ++a) {
          const double h = 1e-3 * std::max(1.0, std::abs(x[a]));
          auto comp = [&](double s) {
            Vec3 y = x;
            y[a] += s * h;
            return B0(y)[a];
          };
          div += (comp(-2) - 8.0 * comp(-1) + 8.0 * comp(1) - comp(2)) / (12.0 * h);
        }
        worst = std::max(worst, std::abs(div));
      }
  return worst;
}

double EulerianInitialData::min_density(int n) const {
  double lo = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        lo = std::min(lo, rho0(Vec3(node(domain[0], i, n), node(domain[1], j, n), node(domain[2], k, n))));
  return lo;
}

namespace {

// Inverts x = gamma(t0, xi); keeps the last preimage as the next starting guess.
class Inverter {
 public:
  Inverter(Solution sol, double t0) : sol_(std::move(sol)), t0_(t0) {}

  EulerianState state(const Vec3& x) {
    const Point4 at = solve(x);
    return eulerian_fields(sol_, at);
  }

 private:
  bool newton(const Vec3& x, std::array<double, 3>& xi) const {
    const double tol = 1e-13 * std::max(1.0, x.norm());
    try {
      for (int it = 0; it < 60; ++it) {
        const Point4 at{t0_, xi[0], xi[1], xi[2]};
        if (!sol_.domain.contains(at)) return false;
        const auto g = derivatives(sol_.gamma, at, sol_.diff, kNoSecond);
        const Vec3 r = vec(g.value) - x;
        if (r.norm() <= tol) return true;
        const Mat3 J = spatial_jacobian(g);
        if (is_singular(J, J.determinant())) return false;
        const Vec3 step = J.partialPivLu().solve(r);
        double lambda = 1.0;
        for (int ls = 0; ls < 30; ++ls, lambda *= 0.5) {
          const std::array<double, 3> trial{xi[0] - lambda * step[0], xi[1] - lambda * step[1], xi[2] - lambda * step[2]};
          const Point4 tp{t0_, trial[0], trial[1], trial[2]};
          if (!sol_.domain.contains(tp)) continue;
          if ((vec(sol_.gamma(tp)) - x).norm() < r.norm() || ls == 29) {
            xi = trial;
            break;
          }
        }
      }
      const Point4 at{t0_, xi[0], xi[1], xi[2]};
      return (vec(sol_.gamma(at)) - x).norm() <= 1e-10 * std::max(1.0, x.norm());
    } catch (const DomainError&) {
      return false;
    }
  }

  Point4 solve(const Vec3& x) {
    std::array<double, 3> xi = guess_;
    if (!(have_ && newton(x, xi))) {
      // Coarse search over the box for the nearest image point.
      const auto& ax = sol_.domain.axes;
      double best = std::numeric_limits<double>::infinity();
      const int n1 = 32, n2 = 32, n3 = 12;
      for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j)
          for (int k = 0; k < n3; ++k) {
            const std::array<double, 3> c{node(ax[1], i, n1), node(ax[2], j, n2), node(ax[3], k, n3)};
            const double d = (vec(sol_.gamma(Point4{t0_, c[0], c[1], c[2]})) - x).norm();
            if (d < best) best = d, xi = c;
          }
      if (!newton(x, xi))
        throw FieldlineError(fmt::format("cannot invert the solution map at ({}, {}, {})", x[0], x[1], x[2]));
    }
    guess_ = xi;
    have_ = true;
    return Point4{t0_, xi[0], xi[1], xi[2]};
  }

  Solution sol_;
  double t0_;
  std::array<double, 3> guess_{};
  bool have_ = false;
};

}  // namespace

EulerianInitialData eulerian_from_solution(const Solution& sol, double t0, const Box3& domain) {
  for (int a = 1; a < 4; ++a)
    if (!sol.domain.axes[a].bounded()) throw std::invalid_argument("map inversion needs a bounded xi box");
  auto inv = std::make_shared<Inverter>(sol, t0);
  EulerianInitialData d;
  d.B0 = [inv](const Vec3& x) { return inv->state(x).B; };
  d.u0 = [inv](const Vec3& x) { return inv->state(x).u; };
  if (sol.constant_density()) {
    const double r = sol.rho0();
    d.rho0 = [r](const Vec3&) { return r; };
  } else {
    d.rho0 = [inv](const Vec3& x) { return inv->state(x).rho; };
  }
  d.domain = domain;
  d.thread_safe = false;
  return d;
}

SeedSurface SeedSurface::parse(const std::array<std::string, 3>& s, double transversality) {
  std::array<Expression, 3> e;
  for (int i = 0; i < 3; ++i) e[i] = Expression::parse(s[i], {"xi2", "xi3"});
  SeedSurface out;
  out.s = [e](double a, double b) {
    const double v[2] = {a, b};
    const std::span<const double> args(v, 2);
    return Vec3(e[0].eval(args), e[1].eval(args), e[2].eval(args));
  };
  out.transversality = transversality;
  out.label = fmt::format("({}, {}, {})", s[0], s[1], s[2]);
  return out;
}

Vec3 SeedSurface::normal(double xi2, double xi3) const {
  const double h2 = 1e-6 * std::max(1.0, std::abs(xi2)), h3 = 1e-6 * std::max(1.0, std::abs(xi3));
  const Vec3 d2 = (s(xi2 + h2, xi3) - s(xi2 - h2, xi3)) / (2.0 * h2);
  const Vec3 d3 = (s(xi2, xi3 + h3) - s(xi2, xi3 - h3)) / (2.0 * h3);
  const Vec3 n = d2.cross(d3);
  if (!(n.norm() > 0.0)) throw FieldlineError("seed surface is degenerate");
  return n.normalized();
}

void IntegratorConfig::validate() const {
  if (!(step > 0.0) || !(abs_tol > 0.0) || !(rel_tol > 0.0) || !(min_step > 0.0) || !(max_param > 0.0))
    throw std::invalid_argument("integrator steps and tolerances must be positive");
}

namespace {

using State = std::array<double, 3>;

struct Rhs {
  const EulerianInitialData* data;
  void operator()(const State& x, State& dx, double) const {
    const Vec3 b = data->b0(Vec3(x[0], x[1], x[2]));
    if (!b.allFinite()) throw FieldlineError("b0 is not finite along the line");
    dx = {b[0], b[1], b[2]};
  }
};

Vec3 to_vec(const State& s) { return Vec3(s[0], s[1], s[2]); }

// Advances x from s to target; returns false if the line leaves the domain.
bool advance(const EulerianInitialData& data, const IntegratorConfig& cfg, State& x, double& s, double target,
             double& dt) {
  const Rhs rhs{&data};
  const double dir = target >= s ? 1.0 : -1.0;
  if (cfg.method == IntegratorConfig::Method::rk4) {
    odeint::runge_kutta4<State> stepper;
    while (dir * (target - s) > 0.0) {
      double h = dir * std::min(cfg.step, dir * (target - s));
      if (dir * (target - (s + h)) < 1e-14 * std::max(1.0, std::abs(target))) h = target - s;
      stepper.do_step(rhs, x, s, h);
      s = (h == target - s) ? target : s + h;
      if (!contains(data.domain, to_vec(x))) return false;
    }
    return true;
  }
  auto stepper = odeint::make_controlled(cfg.abs_tol, cfg.rel_tol, odeint::runge_kutta_dopri5<State>());
  dt = dir * std::abs(dt);
  while (dir * (target - s) > 0.0) {
    const bool clipped = dir * (s + dt - target) >= 0.0;
    double h = clipped ? target - s : dt;
    if (stepper.try_step(rhs, x, s, h) == odeint::success) {
      if (clipped) s = target;
      else dt = h;
      if (!contains(data.domain, to_vec(x))) return false;
    } else {
      dt = h;
      if (std::abs(dt) < cfg.min_step) throw FieldlineError(fmt::format("step underflow at xi1 = {}", s));
    }
  }
  return true;
}

}  // namespace

Polyline trace_line(const EulerianInitialData& data, const Vec3& x0, std::vector<double> params,
                    const IntegratorConfig& cfg) {
  cfg.validate();
  if (params.empty()) throw std::invalid_argument("trace_line needs at least one parameter value");
  if (!contains(data.domain, x0)) throw DomainError("start point lies outside the data domain");
  std::sort(params.begin(), params.end());
  for (double s : params)
    if (!std::isfinite(s) || std::abs(s) > cfg.max_param)
      throw std::invalid_argument(fmt::format("parameter {} exceeds the allowed range", s));

  std::vector<double> neg, pos;
  for (double s : params) (s < 0.0 ? neg : pos).push_back(s);
  std::reverse(neg.begin(), neg.end());

  Polyline line;
  auto run = [&](const std::vector<double>& targets, std::vector<Vec3>& pts, std::vector<double>& ss) {
    State x{x0[0], x0[1], x0[2]};
    double s = 0.0, dt = cfg.step;
    for (double target : targets) {
      if (!advance(data, cfg, x, s, target, dt)) {
        line.truncated = true;
        line.note = fmt::format("left the domain before xi1 = {}", target);
        return;
      }
      pts.push_back(to_vec(x));
      ss.push_back(target);
    }
  };
  std::vector<Vec3> npts, ppts;
  std::vector<double> ns, ps;
  run(neg, npts, ns);
  run(pos, ppts, ps);
  for (std::size_t i = npts.size(); i-- > 0;) {
    line.points.push_back(npts[i]);
    line.params.push_back(ns[i]);
  }
  line.points.insert(line.points.end(), ppts.begin(), ppts.end());
  line.params.insert(line.params.end(), ps.begin(), ps.end());
  if (!line.points.empty()) line.gap = (line.points.back() - line.points.front()).norm();
  return line;
}

Polyline trace_line(const EulerianInitialData& data, const Vec3& x0, double lo, double hi, int n,
                    const IntegratorConfig& cfg) {
  if (n < 2 || !(hi > lo)) throw std::invalid_argument("trace_line needs n >= 2 and hi > lo");
  std::vector<double> params(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) params[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  return trace_line(data, x0, std::move(params), cfg);
}

std::size_t InitialMap::index(int i1, int i2, int i3) const {
  return (static_cast<std::size_t>(i1) * static_cast<std::size_t>(axes[1].n) + static_cast<std::size_t>(i2)) *
             static_cast<std::size_t>(axes[2].n) +
         static_cast<std::size_t>(i3);
}

namespace {

void check_grid(const Grid3& g) {
  for (const auto& a : g)
    if (a.n < 5 || !(a.hi > a.lo)) throw std::invalid_argument("tabulated maps need >= 5 points and hi > lo per axis");
}

// Fourth-order derivative of samples v(i) = v[base + i * stride] at node i.
double diff4(const std::vector<Vec3>& v, std::size_t base, std::size_t stride, int i, int n, double h, int c) {
  auto at = [&](int k) { return v[base + static_cast<std::size_t>(k) * stride][c]; };
  if (i >= 2 && i <= n - 3) return (at(i - 2) - 8.0 * at(i - 1) + 8.0 * at(i + 1) - at(i + 2)) / (12.0 * h);
  if (i == 0) return (-25.0 * at(0) + 48.0 * at(1) - 36.0 * at(2) + 16.0 * at(3) - 3.0 * at(4)) / (12.0 * h);
  if (i == 1) return (-3.0 * at(0) - 10.0 * at(1) + 18.0 * at(2) - 6.0 * at(3) + at(4)) / (12.0 * h);
  if (i == n - 2)
    return -(-3.0 * at(n - 1) - 10.0 * at(n - 2) + 18.0 * at(n - 3) - 6.0 * at(n - 4) + at(n - 5)) / (12.0 * h);
  return -(-25.0 * at(n - 1) + 48.0 * at(n - 2) - 36.0 * at(n - 3) + 16.0 * at(n - 4) - 3.0 * at(n - 5)) / (12.0 * h);
}

std::vector<double> scalar_diff_xi1(const InitialMap& m, const std::vector<double>& g) {
  std::vector<Vec3> wrapped(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) wrapped[i] = Vec3(g[i], 0.0, 0.0);
  const int n1 = m.axes[0].n, n2 = m.axes[1].n, n3 = m.axes[2].n;
  const double h = (m.axes[0].hi - m.axes[0].lo) / (n1 - 1);
  std::vector<double> out(g.size());
  for (int i1 = 0; i1 < n1; ++i1)
    for (int i2 = 0; i2 < n2; ++i2)
      for (int i3 = 0; i3 < n3; ++i3)
        out[m.index(i1, i2, i3)] = diff4(wrapped, m.index(0, i2, i3), static_cast<std::size_t>(n2 * n3), i1, n1, h, 0);
  return out;
}

void finish_map(InitialMap& m, const ScalarField3& rho0) {
  const auto det = tabulated_determinant(m);
  m.f.resize(det.size());
  bool pos = false, neg = false;
  for (std::size_t i = 0; i < det.size(); ++i) {
    m.f[i] = rho0(m.gamma0[i]) * det[i];
    pos = pos || det[i] > 0.0;
    neg = neg || det[i] < 0.0;
  }
  m.fold_over = pos && neg;
  if (m.fold_over) m.notes.push_back("Jacobian determinant changes sign: the traced map folds over");
  m.f_variation = 0.0;
  for (int i2 = 0; i2 < m.axes[1].n; ++i2)
    for (int i3 = 0; i3 < m.axes[2].n; ++i3) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (int i1 = 0; i1 < m.axes[0].n; ++i1) {
        const double v = m.f[m.index(i1, i2, i3)];
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      m.f_variation = std::max(m.f_variation, hi - lo);
    }
}

}  // namespace

std::vector<double> tabulated_determinant(const InitialMap& m) {
  check_grid(m.axes);
  const int n[3] = {m.axes[0].n, m.axes[1].n, m.axes[2].n};
  const std::size_t stride[3] = {static_cast<std::size_t>(n[1] * n[2]), static_cast<std::size_t>(n[2]), 1};
  double h[3];
  for (int a = 0; a < 3; ++a) h[a] = (m.axes[a].hi - m.axes[a].lo) / (n[a] - 1);
  std::vector<double> det(m.gamma0.size());
  for (int i1 = 0; i1 < n[0]; ++i1)
    for (int i2 = 0; i2 < n[1]; ++i2)
      for (int i3 = 0; i3 < n[2]; ++i3) {
        const int idx[3] = {i1, i2, i3};
        Mat3 J;
        for (int a = 0; a < 3; ++a) {
          int b0[3] = {i1, i2, i3};
          b0[a] = 0;
          const std::size_t base = m.index(b0[0], b0[1], b0[2]);
          for (int c = 0; c < 3; ++c) J(c, a) = diff4(m.gamma0, base, stride[a], idx[a], n[a], h[a], c);
        }
        det[m.index(i1, i2, i3)] = J.determinant();
      }
  return det;
}

InitialMap build_initial_map(const EulerianInitialData& data, const SeedSurface& seed, const Grid3& grid,
                             const IntegratorConfig& cfg, Execution exec) {
  check_grid(grid);
  cfg.validate();
  InitialMap m;
  m.axes = grid;
  const int n1 = grid[0].n, n2 = grid[1].n, n3 = grid[2].n;
  m.gamma0.assign(static_cast<std::size_t>(n1) * n2 * n3, Vec3::Zero());
  std::vector<double> params(static_cast<std::size_t>(n1));
  for (int i = 0; i < n1; ++i) params[static_cast<std::size_t>(i)] = grid[0].at(i);

  const int lines = n2 * n3;
  std::vector<double> transversal(static_cast<std::size_t>(lines), 0.0);
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(lines));
  auto trace_one = [&](int l) {
    const int i2 = l / n3, i3 = l % n3;
    const double xi2 = grid[1].at(i2), xi3 = grid[2].at(i3);
    const Vec3 x0 = seed(xi2, xi3);
    const Vec3 b = data.b0(x0);
    if (!(b.norm() > 0.0)) throw FieldlineError("b0 vanishes on the seed surface");
    const double tr = std::abs(b.normalized().dot(seed.normal(xi2, xi3)));
    transversal[static_cast<std::size_t>(l)] = tr;
    if (tr < seed.transversality)
      throw FieldlineError(fmt::format("seed surface not transversal at (xi2, xi3) = ({}, {}): |b.n| = {:.3g}", xi2, xi3, tr));
    const Polyline line = trace_line(data, x0, params, cfg);
    if (line.truncated)
      throw FieldlineError(fmt::format("line from (xi2, xi3) = ({}, {}) escaped: {}", xi2, xi3, line.note));
    for (int i1 = 0; i1 < n1; ++i1) m.gamma0[m.index(i1, i2, i3)] = line.points[static_cast<std::size_t>(i1)];
  };
  const bool par = exec == Execution::parallel && data.thread_safe;
#pragma omp parallel for schedule(dynamic, 1) if (par)
  for (int l = 0; l < lines; ++l) {
    try {
      trace_one(l);
    } catch (...) {
      errors[static_cast<std::size_t>(l)] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  m.min_transversality = *std::min_element(transversal.begin(), transversal.end());
  finish_map(m, data.rho0);
  return m;
}

InitialMap tabulate_solution_map(const Solution& sol, double t0, const Grid3& grid, const ScalarField3& rho0) {
  check_grid(grid);
  InitialMap m;
  m.axes = grid;
  m.gamma0.resize(static_cast<std::size_t>(grid[0].n) * grid[1].n * grid[2].n);
  for (int i1 = 0; i1 < grid[0].n; ++i1)
    for (int i2 = 0; i2 < grid[1].n; ++i2)
      for (int i3 = 0; i3 < grid[2].n; ++i3)
        m.gamma0[m.index(i1, i2, i3)] = vec(sol.gamma(Point4{t0, grid[0].at(i1), grid[1].at(i2), grid[2].at(i3)}));
  finish_map(m, rho0);
  return m;
}

ResidualReport incompressibility_check(const InitialMap& map, const ScalarField3& rho0,
                                       const std::function<double(double, double)>& f, double tolerance) {
  const auto det = tabulated_determinant(map);
  std::vector<double> g(det.size());
  for (std::size_t i = 0; i < det.size(); ++i) g[i] = rho0(map.gamma0[i]) * det[i];
  const auto dg = scalar_diff_xi1(map, g);

  ResidualReport rep;
  rep.check = "initial_incompressibility";
  rep.mode = DerivativeMode::finite_difference;
  rep.tolerance = tolerance;
  rep.points = det.size();
  EquationNorm inc{"incompressibility", 0.0, 0.0, {}}, var{"variation_xi1", 0.0, 0.0, {}};
  for (int i1 = 0; i1 < map.axes[0].n; ++i1)
    for (int i2 = 0; i2 < map.axes[1].n; ++i2)
      for (int i3 = 0; i3 < map.axes[2].n; ++i3) {
        const std::size_t k = map.index(i1, i2, i3);
        const Point4 at{0.0, map.axes[0].at(i1), map.axes[1].at(i2), map.axes[2].at(i3)};
        const double r = std::abs(g[k] - f(at.xi2, at.xi3)), d = std::abs(dg[k]);
        if (k == 0) inc.worst = var.worst = at;
        if (r > inc.max_norm) inc.max_norm = r, inc.worst = at;
        if (d > var.max_norm) var.max_norm = d, var.worst = at;
        inc.l2_norm += r * r;
        var.l2_norm += d * d;
      }
  inc.l2_norm = std::sqrt(inc.l2_norm / static_cast<double>(rep.points));
  var.l2_norm = std::sqrt(var.l2_norm / static_cast<double>(rep.points));
  rep.equations = {inc, var};
  rep.passed = inc.max_norm <= tolerance;
  if (map.fold_over) rep.notes.push_back("map folds over (det changes sign)");
  return rep;
}

std::vector<Vec3> build_initial_velocity(const VectorField3& u0, const InitialMap& map) {
  std::vector<Vec3> out(map.gamma0.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = u0(map.gamma0[i]);
    if (!out[i].allFinite()) throw FieldlineError("u0 is not finite on the map");
  }
  return out;
}

std::string format_initial_map(const InitialMap& map) {
  std::string out = "# mhdnat initial map\n";
  static const char* names[] = {"xi1", "xi2", "xi3"};
  for (int a = 0; a < 3; ++a)
    out += fmt::format("axis {} {:.17g} {:.17g} {}\n", names[a], map.axes[a].lo, map.axes[a].hi, map.axes[a].n);
  out += "columns xi1 xi2 xi3 x y z f\n";
  for (int i1 = 0; i1 < map.axes[0].n; ++i1)
    for (int i2 = 0; i2 < map.axes[1].n; ++i2)
      for (int i3 = 0; i3 < map.axes[2].n; ++i3) {
        const std::size_t k = map.index(i1, i2, i3);
        const Vec3& x = map.gamma0[k];
        out += fmt::format("{:.17g} {:.17g} {:.17g} {:.17g} {:.17g} {:.17g} {:.17g}\n", map.axes[0].at(i1),
                           map.axes[1].at(i2), map.axes[2].at(i3), x[0], x[1], x[2], map.f.empty() ? 0.0 : map.f[k]);
      }
  return out;
}

}  // namespace mhdnat
