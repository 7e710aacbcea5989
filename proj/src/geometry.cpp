#include "mhdnat/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>

#include <fmt/format.h>

namespace mhdnat {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

using Edge = std::pair<int, int>;

template <class F>
void for_each_edge(const SurfaceMesh& m, F&& f) {
  for (const auto& q : m.quads)
    for (int k = 0; k < 4; ++k) f(q[k], q[(k + 1) % 4]);
}

double signed_volume(const SurfaceMesh& m) {
  double v = 0.0;
  for (const auto& q : m.quads) {
    const Vec3& a = m.vertices[q[0]];
    v += a.dot(m.vertices[q[1]].cross(m.vertices[q[2]])) + a.dot(m.vertices[q[2]].cross(m.vertices[q[3]]));
  }
  return v / 6.0;
}

}  // namespace

std::size_t SurfaceMesh::edge_count() const {
  std::map<Edge, int> edges;
  for_each_edge(*this, [&](int a, int b) { edges[{std::min(a, b), std::max(a, b)}]++; });
  return edges.size();
}

int SurfaceMesh::euler_characteristic() const {
  return static_cast<int>(vertices.size()) - static_cast<int>(edge_count()) + static_cast<int>(quads.size());
}

SurfaceMesh sample_surface(const Solution& sol, double t0, FixAxis fix, double value, const CellAxis& u,
                           const CellAxis& v, const SurfaceOptions& opt) {
  if (u.cells < 1 || v.cells < 1) throw std::invalid_argument("surface grids need at least one cell per axis");
  GridSpec grid;
  grid.axes[0] = {t0, t0, 1};
  grid.axes[1] = {u.lo, u.hi, u.cells + 1};
  const AxisSpec free{v.lo, v.hi, v.cells + 1}, pinned{value, value, 1};
  grid.axes[2] = fix == FixAxis::xi3 ? free : pinned;
  grid.axes[3] = fix == FixAxis::xi3 ? pinned : free;
  grid.validate(sol.domain);

  auto kernel = [&](const Point4& at, double* out) {
    const EulerianState s = eulerian_fields(sol, at);
    out[0] = s.x[0], out[1] = s.x[1], out[2] = s.x[2];
    out[3] = s.B.norm(), out[4] = s.P, out[5] = s.p;
    return true;
  };
  const SweepResult raw = sweep(grid, 6, kernel, opt.exec);
  const int cu = u.cells, cv = v.cells;
  auto node = [&](int i, int j) { return raw.row(static_cast<std::size_t>(i) * (cv + 1) + j); };
  auto pos = [&](int i, int j) {
    const double* r = node(i, j);
    return Vec3(r[0], r[1], r[2]);
  };

  SurfaceMesh m;
  m.t0 = t0;
  m.fixed = fix;
  m.fixed_value = value;
  m.periodic_u = cu >= 2;
  for (int j = 0; j <= cv && m.periodic_u; ++j) m.periodic_u = (pos(0, j) - pos(cu, j)).norm() <= opt.stitch_tol;
  m.periodic_v = cv >= 2;
  for (int i = 0; i <= cu && m.periodic_v; ++i) m.periodic_v = (pos(i, 0) - pos(i, cv)).norm() <= opt.stitch_tol;
  m.nu = m.periodic_u ? cu : cu + 1;
  m.nv = m.periodic_v ? cv : cv + 1;

  for (int i = 0; i < m.nu; ++i)
    for (int j = 0; j < m.nv; ++j) {
      const double* r = node(i, j);
      m.vertices.emplace_back(r[0], r[1], r[2]);
      m.B_mag.push_back(r[3]);
      m.P.push_back(r[4]);
      m.p.push_back(r[5]);
    }
  auto idx = [&](int i, int j) {
    if (i == cu && m.periodic_u) i = 0;
    if (j == cv && m.periodic_v) j = 0;
    return i * m.nv + j;
  };
  for (int i = 0; i < cu; ++i)
    for (int j = 0; j < cv; ++j) m.quads.push_back({idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)});

  if (opt.orient_outward && m.periodic_u && m.periodic_v && signed_volume(m) < 0.0) {
    for (auto& q : m.quads) std::swap(q[1], q[3]);
    m.flipped = true;
  }
  return m;
}

MeshCheck check_mesh(const SurfaceMesh& m) {
  MeshCheck c;
  for (const auto& x : m.vertices) c.finite = c.finite && x.allFinite();
  const int n = static_cast<int>(m.vertices.size());
  for (const auto& q : m.quads)
    for (int k : q) c.indices_valid = c.indices_valid && k >= 0 && k < n;
  if (!c.indices_valid) {
    c.watertight = c.consistently_oriented = false;
    return c;
  }
  std::map<Edge, std::pair<int, int>> edges;  // count, orientation balance
  for_each_edge(m, [&](int a, int b) {
    auto& e = edges[{std::min(a, b), std::max(a, b)}];
    e.first++;
    e.second += a < b ? 1 : -1;
  });
  for (const auto& [key, e] : edges) {
    if (e.first == 1) ++c.boundary_edges;
    if (e.first > 2) ++c.nonmanifold_edges;
    if (e.first == 2 && e.second != 0) c.consistently_oriented = false;
  }
  c.watertight = c.boundary_edges == 0 && c.nonmanifold_edges == 0 && !m.quads.empty();
  c.euler = n - static_cast<int>(edges.size()) + static_cast<int>(m.quads.size());
  c.signed_volume = signed_volume(m);
  return c;
}

Polyline sample_magnetic_line(const Solution& sol, double t0, double xi2, double xi3, double lo, double hi, int n,
                              double closure_tol) {
  if (n < 2 || !(hi > lo)) throw std::invalid_argument("magnetic lines need n >= 2 and hi > lo");
  Polyline line;
  for (int i = 0; i < n; ++i) {
    const double s = lo + (hi - lo) * i / (n - 1);
    const Point4 at{t0, s, xi2, xi3};
    if (!sol.domain.contains(at))
      throw DomainError(fmt::format("magnetic line point ({}, {}, {}, {}) outside the domain", t0, s, xi2, xi3));
    line.points.push_back(vec(sol.gamma(at)));
    line.params.push_back(s);
  }
  line.gap = (line.points.back() - line.points.front()).norm();
  line.closed = line.gap <= closure_tol;
  return line;
}

namespace {

// Best rational approximation with denominator <= max_den (continued fractions).
std::optional<std::pair<long, long>> rationalize(double x, int max_den, double tol) {
  long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double r = x;
  for (int it = 0; it < 64; ++it) {
    const double a = std::floor(r);
    const long p2 = static_cast<long>(a) * p1 + p0, q2 = static_cast<long>(a) * q1 + q0;
    if (q2 > max_den) break;
    p0 = p1, q0 = q1, p1 = p2, q1 = q2;
    if (std::abs(static_cast<double>(p1) / static_cast<double>(q1) - x) <= tol * std::max(1.0, std::abs(x)))
      return std::make_pair(p1, q1);
    const double frac = r - a;
    if (frac == 0.0) break;
    r = 1.0 / frac;
  }
  return std::nullopt;
}

}  // namespace

std::optional<double> minimal_period(const std::vector<double>& rates, int max_den) {
  std::vector<double> r;
  for (double x : rates)
    if (x != 0.0) r.push_back(std::abs(x));
  if (r.empty()) return std::nullopt;
  // Period T = (2 pi / r0) * lcm_i (r0 / ri); with r0 / ri = a_i / b_i, lcm = lcm(a) / gcd(b).
  long num = 1, den = 0;
  for (double x : r) {
    const auto q = rationalize(r[0] / x, max_den, 1e-12);
    if (!q) return std::nullopt;
    num = std::lcm(num, q->first);
    den = std::gcd(den, q->second);
  }
  return kTwoPi / r[0] * static_cast<double>(num) / static_cast<double>(den);
}

std::optional<double> phase_rate(const ScalarFn1& phi) {
  if (phi.constant_value()) return 0.0;
  if (!phi.has_expression()) return std::nullopt;
  return phi.derivative(0).constant_value();
}

namespace {

struct Segments {
  std::vector<Vec3> mid, d;
};

Segments segments_of(const std::vector<Vec3>& pts) {
  Segments s;
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3& a = pts[i];
    const Vec3& b = pts[(i + 1) % n];
    s.mid.push_back(0.5 * (a + b));
    s.d.push_back(b - a);
  }
  return s;
}

double gauss_sum(const Segments& a, const Segments& b) {
  double sum = 0.0;
#pragma omp parallel for reduction(+ : sum) schedule(static)
  for (std::size_t i = 0; i < a.mid.size(); ++i) {
    for (std::size_t j = 0; j < b.mid.size(); ++j) {
      const Vec3 r = a.mid[i] - b.mid[j];
      const double n = r.norm();
      sum += r.dot(a.d[i].cross(b.d[j])) / (n * n * n);
    }
  }
  return sum / (4.0 * std::numbers::pi);
}

double min_distance(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& x : a)
    for (const auto& y : b) best = std::min(best, (x - y).norm());
  return best;
}

// Closed vertex loop: drops a repeated end point.
std::vector<Vec3> loop_of(const Polyline& c, double closure_tol) {
  if (c.points.size() < 3) throw GeometryError("linking number needs curves with at least 3 points");
  const double gap = (c.points.back() - c.points.front()).norm();
  if (gap > closure_tol) throw GeometryError(fmt::format("curve is open (gap {:.3e})", gap));
  std::vector<Vec3> pts = c.points;
  pts.pop_back();
  return pts;
}

LinkResult finish(double raw, int segments, bool converged, const LinkOptions& opt) {
  LinkResult r;
  r.raw = raw;
  r.value = static_cast<int>(std::lround(raw));
  r.segments = segments;
  r.converged = converged;
  if (std::abs(raw - r.value) > opt.integer_tol)
    throw GeometryError(fmt::format("Gauss integral {:.6f} is not within {} of an integer", raw, opt.integer_tol));
  return r;
}

}  // namespace

LinkResult linking_number(const Polyline& c1, const Polyline& c2, const LinkOptions& opt) {
  const auto a = loop_of(c1, opt.closure_tol), b = loop_of(c2, opt.closure_tol);
  const double dmin = min_distance(a, b);
  if (dmin < opt.min_distance)
    throw GeometryError(fmt::format("curves nearly intersect (distance {:.3e})", dmin));
  return finish(gauss_sum(segments_of(a), segments_of(b)), static_cast<int>(std::min(a.size(), b.size())), true, opt);
}

LinkResult linking_number(const ClosedCurve& c1, const ClosedCurve& c2, const LinkOptions& opt, double change_tol,
                          int max_segments) {
  auto sample = [](const ClosedCurve& c, int n) {
    std::vector<Vec3> pts(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) pts[static_cast<std::size_t>(i)] = c(static_cast<double>(i) / n);
    return pts;
  };
  int n = 256;
  auto a = sample(c1, n), b = sample(c2, n);
  const double gap1 = (c1(1.0) - c1(0.0)).norm(), gap2 = (c2(1.0) - c2(0.0)).norm();
  if (gap1 > opt.closure_tol || gap2 > opt.closure_tol)
    throw GeometryError(fmt::format("curve is open (gaps {:.3e}, {:.3e})", gap1, gap2));
  const double dmin = min_distance(a, b);
  if (dmin < opt.min_distance) throw GeometryError(fmt::format("curves nearly intersect (distance {:.3e})", dmin));
  double prev = gauss_sum(segments_of(a), segments_of(b));
  while (2 * n <= max_segments) {
    n *= 2;
    a = sample(c1, n);
    b = sample(c2, n);
    const double next = gauss_sum(segments_of(a), segments_of(b));
    const bool done = std::abs(next - prev) <= change_tol;
    prev = next;
    if (done) return finish(prev, n, true, opt);
  }
  return finish(prev, n, false, opt);
}

namespace {

int winding(const std::vector<std::array<double, 2>>& pts) {
  double total = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& a = pts[i];
    const auto& b = pts[(i + 1) % pts.size()];
    double d = std::atan2(b[1], b[0]) - std::atan2(a[1], a[0]);
    if (d > std::numbers::pi) d -= kTwoPi;
    if (d < -std::numbers::pi) d += kTwoPi;
    total += d;
  }
  return static_cast<int>(std::lround(total / kTwoPi));
}

}  // namespace

TorusWinding torus_winding(const Polyline& c) {
  std::vector<Vec3> pts = c.points;
  if (pts.size() >= 2 && (pts.back() - pts.front()).norm() <= 1e-9 * std::max(1.0, pts.front().norm()))
    pts.pop_back();
  if (pts.size() < 3) throw GeometryError("winding needs at least 3 points");
  std::vector<std::array<double, 2>> yz, mer;
  double mx = 0.0, mr = 0.0, scale = 0.0;
  for (const auto& x : pts) {
    yz.push_back({x[1], x[2]});
    const double rho = std::hypot(x[1], x[2]);
    mx += x[0];
    mr += rho;
    scale = std::max(scale, x.norm());
  }
  mx /= static_cast<double>(pts.size());
  mr /= static_cast<double>(pts.size());
  double excursion = std::numeric_limits<double>::infinity();
  for (const auto& x : pts) {
    mer.push_back({x[0] - mx, std::hypot(x[1], x[2]) - mr});
    excursion = std::min(excursion, std::hypot(mer.back()[0], mer.back()[1]));
  }
  TorusWinding w;
  w.toroidal = winding(yz);
  // A curve hugging its mean meridional point has no defined poloidal turn.
  w.poloidal = excursion > 1e-6 * std::max(1.0, scale) ? winding(mer) : 0;
  return w;
}

Polyline core_curve(const SurfaceMesh& mesh) {
  Polyline c;
  for (int i = 0; i < mesh.nu; ++i) {
    Vec3 sum = Vec3::Zero();
    for (int j = 0; j < mesh.nv; ++j) sum += mesh.vertices[static_cast<std::size_t>(i * mesh.nv + j)];
    c.points.push_back(sum / mesh.nv);
    c.params.push_back(i);
  }
  if (mesh.periodic_u) {
    c.points.push_back(c.points.front());
    c.params.push_back(mesh.nu);
  }
  c.gap = (c.points.back() - c.points.front()).norm();
  c.closed = mesh.periodic_u;
  return c;
}

}  // namespace mhdnat
