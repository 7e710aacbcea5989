#pragma once

#include <array>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mhdnat/grid/sweep.hpp"
#include "mhdnat/polyline.hpp"
#include "mhdnat/solution.hpp"

namespace mhdnat {

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class FixAxis { xi2, xi3 };

// Samples along one axis: `cells` intervals over [lo, hi] (cells + 1 nodes
// before periodic stitching).
struct CellAxis {
  double lo = 0.0;
  double hi = 1.0;
  int cells = 1;

  double at(int i) const { return lo + (hi - lo) * i / cells; }
};

// Quad mesh of a magnetic surface gamma(t0, xi1, v) with xi2 or xi3 fixed.
// Vertex (i, j) has xi1 = u.at(i) and free coordinate v.at(j).
struct SurfaceMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 4>> quads;
  std::vector<double> B_mag, P, p;  // per vertex
  double t0 = 0.0;
  FixAxis fixed = FixAxis::xi3;
  double fixed_value = 0.0;
  int nu = 0, nv = 0;  // distinct vertex columns/rows after stitching
  bool periodic_u = false, periodic_v = false;
  bool flipped = false;  // orientation reversed to point outward

  std::size_t edge_count() const;
  int euler_characteristic() const;
};

struct SurfaceOptions {
  double stitch_tol = 1e-9;
  bool orient_outward = true;
  Execution exec = Execution::parallel;
};

SurfaceMesh sample_surface(const Solution& sol, double t0, FixAxis fix, double value, const CellAxis& u,
                           const CellAxis& v, const SurfaceOptions& opt = {});

struct MeshCheck {
  bool finite = true;
  bool indices_valid = true;
  bool watertight = true;          // every edge in exactly two quads
  bool consistently_oriented = true;  // shared edges traversed in opposite directions
  std::size_t boundary_edges = 0;
  std::size_t nonmanifold_edges = 0;
  int euler = 0;
  double signed_volume = 0.0;
};

MeshCheck check_mesh(const SurfaceMesh& mesh);

// Closure is declared when |x(hi) - x(lo)| <= closure_tol.
Polyline sample_magnetic_line(const Solution& sol, double t0, double xi2, double xi3, double lo, double hi, int n,
                              double closure_tol = 1e-9);

// Least common period of functions with periods 2 pi / rate; nullopt when a
// ratio is not rational with denominator <= max_den (quasi-periodic).
std::optional<double> minimal_period(const std::vector<double>& rates, int max_den = 1000);

// Constant derivative of an expression in mu (the rate of a linear phase).
std::optional<double> phase_rate(const ScalarFn1& phi);

struct LinkResult {
  int value = 0;
  double raw = 0.0;
  int segments = 0;
  bool converged = false;
};

struct LinkOptions {
  double closure_tol = 1e-6;
  double min_distance = 1e-3;
  double integer_tol = 1e-2;
};

// Gauss double integral over segment pairs (midpoint rule) of two closed polylines.
LinkResult linking_number(const Polyline& c1, const Polyline& c2, const LinkOptions& opt = {});

// Curves parametrized on [0, 1) and periodic; the segment count starts at 256
// and doubles until the raw value changes by <= change_tol.
using ClosedCurve = std::function<Vec3(double)>;
LinkResult linking_number(const ClosedCurve& c1, const ClosedCurve& c2, const LinkOptions& opt = {},
                          double change_tol = 1e-3, int max_segments = 1 << 14);

// Windings of a closed curve about the x axis: `toroidal` counts turns of
// (y, z) about the origin, `poloidal` counts turns of (x, |(y, z)|) about its
// mean. A torus knot of type (p, q) with p, q >= 2 coprime is nontrivially knotted.
struct TorusWinding {
  int toroidal = 0;
  int poloidal = 0;
};
TorusWinding torus_winding(const Polyline& c);

// Core curve of a surface mesh: the mean vertex of each xi1 column.
Polyline core_curve(const SurfaceMesh& mesh);

}  // namespace mhdnat
