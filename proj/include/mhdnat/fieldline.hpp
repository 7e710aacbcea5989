#pragma once

#include <array>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "mhdnat/grid/sweep.hpp"
#include "mhdnat/polyline.hpp"
#include "mhdnat/solution.hpp"

namespace mhdnat {

class FieldlineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Box3 = std::array<Interval, 3>;
using VectorField3 = std::function<Vec3(const Vec3&)>;
using ScalarField3 = std::function<double(const Vec3&)>;

bool contains(const Box3& box, const Vec3& x);

// Eulerian initial state B0, rho0, u0 on a box in x.
struct EulerianInitialData {
  VectorField3 B0;
  ScalarField3 rho0;
  VectorField3 u0;
  Box3 domain;
  bool thread_safe = true;  // false when the fields keep evaluation caches

  // Expressions in x, y, z; u0 defaults to zero.
  static EulerianInitialData parse(const std::array<std::string, 3>& B0, const std::string& rho0,
                                   const std::array<std::string, 3>& u0, const Box3& domain);

  Vec3 b0(const Vec3& x) const;  // B0 / rho0
  // Largest |div B0| on an n^3 grid (fourth-order central differences).
  double max_divergence(int n = 9) const;
  double min_density(int n = 9) const;
};

// Eulerian fields of a solution at a fixed time, obtained by inverting
// x = gamma(t0, xi) with Newton's method (warm-started from the last hit).
EulerianInitialData eulerian_from_solution(const Solution& sol, double t0, const Box3& domain);

// x = s(xi2, xi3), the surface carrying xi1 = 0.
struct SeedSurface {
  std::function<Vec3(double, double)> s;
  double transversality = 0.1;  // minimum |b0_hat . n_hat|
  std::string label;

  static SeedSurface parse(const std::array<std::string, 3>& s, double transversality = 0.1);
  Vec3 operator()(double xi2, double xi3) const { return s(xi2, xi3); }
  Vec3 normal(double xi2, double xi3) const;  // unit normal
};

struct IntegratorConfig {
  enum class Method { rk4, rk45 };
  Method method = Method::rk45;
  double step = 1e-2;       // fixed step (rk4) or initial step (rk45)
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  double min_step = 1e-13;  // rk45 step underflow
  double max_param = 1e4;   // largest |xi1| that may be requested

  void validate() const;
};

// Solves dx/dxi1 = b0(x), x(0) = x0, reporting x at each requested parameter
// (any order; output is sorted). Leaving the domain truncates the line.
Polyline trace_line(const EulerianInitialData& data, const Vec3& x0, std::vector<double> params,
                    const IntegratorConfig& cfg = {});
Polyline trace_line(const EulerianInitialData& data, const Vec3& x0, double lo, double hi, int n,
                    const IntegratorConfig& cfg = {});

using Grid3 = std::array<AxisSpec, 3>;  // xi1, xi2, xi3

// gamma0 and f tabulated row-major with xi1 slowest.
struct InitialMap {
  Grid3 axes;
  std::vector<Vec3> gamma0;
  std::vector<double> f;        // rho0(gamma0) det(d gamma0 / d xi)
  double f_variation = 0.0;     // max over (xi2, xi3) of the spread of f along xi1
  double min_transversality = 0.0;
  bool fold_over = false;       // det changes sign on the grid
  std::vector<std::string> notes;

  std::size_t index(int i1, int i2, int i3) const;
  std::size_t size() const { return gamma0.size(); }
};

InitialMap build_initial_map(const EulerianInitialData& data, const SeedSurface& seed, const Grid3& grid,
                             const IntegratorConfig& cfg = {}, Execution exec = Execution::parallel);

// Tabulates gamma(t0, .) of a solution on the grid (no tracing).
InitialMap tabulate_solution_map(const Solution& sol, double t0, const Grid3& grid, const ScalarField3& rho0);

// Jacobian determinant of the tabulated map by fourth-order differences
// (one-sided five-point stencils at the edges); needs >= 5 points per axis.
std::vector<double> tabulated_determinant(const InitialMap& map);

// max |rho0(gamma0) det - f(xi2, xi3)| ("incompressibility") and the largest
// |d/dxi1 (rho0 det)| ("variation_xi1").
ResidualReport incompressibility_check(const InitialMap& map, const ScalarField3& rho0,
                                       const std::function<double(double, double)>& f, double tolerance = 1e-5);

// gamma1 = u0(gamma0) pointwise.
std::vector<Vec3> build_initial_velocity(const VectorField3& u0, const InitialMap& map);

// Text layout: header lines "axis <name> <lo> <hi> <n>", then one row per
// node "xi1 xi2 xi3 x y z f" in row-major order.
std::string format_initial_map(const InitialMap& map);

}  // namespace mhdnat
