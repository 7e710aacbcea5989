#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "mhdnat/diffgeo.hpp"
#include "mhdnat/field.hpp"
#include "mhdnat/grid/sweep.hpp"
#include "mhdnat/scalar_fn.hpp"
#include "mhdnat/state_function.hpp"

namespace mhdnat {

// Incompressible closure: total pressure P(t, xi) is given.
struct TotalPressure {
  ScalarField P;
};

// Compressible closure: gas pressure p(t, xi) is given; the total pressure is
// p + rho^2 |gamma_xi1|^2 / 2 unless an explicit P is supplied.
struct GasPressure {
  ScalarField p;
  std::optional<ScalarField> P;
  std::optional<ScalarField> entropy;
};

using PressureModel = std::variant<TotalPressure, GasPressure>;
using Density = std::variant<double, ScalarField>;

struct Solution {
  std::string family;
  Map gamma;
  Density density = 1.0;
  PressureModel pressure = TotalPressure{};
  ScalarFn2 f = ScalarFn2::constant(1.0);  // Cauchy function f(xi2, xi3)
  DomainBox domain;
  DiffOptions diff;
  std::optional<StateFunction> h;  // compressible state function

  bool compressible() const { return std::holds_alternative<GasPressure>(pressure); }
  bool constant_density() const { return std::holds_alternative<double>(density); }
  double rho0() const;  // throws unless the density is constant
  // Installs the domain box on every field so finite differences respect it.
  void set_domain(const DomainBox& box);
};

struct EulerianState {
  Vec3 x, u, b, B;
  double rho = 0.0;
  double p = 0.0;
  double P = 0.0;
};

EulerianState eulerian_fields(const Solution& sol, const Point4& at);

struct EquationNorm {
  std::string name;
  double max_norm = 0.0;
  double l2_norm = 0.0;  // root mean square over included points
  Point4 worst;
};

struct ResidualReport {
  std::string check;
  std::vector<EquationNorm> equations;
  std::size_t points = 0;
  std::size_t excluded = 0;
  DerivativeMode mode = DerivativeMode::closed_form;
  StencilConfig stencil;
  double tolerance = 0.0;
  bool passed = false;
  std::vector<std::string> notes;

  double max_norm() const;
  const EquationNorm& equation(const std::string& name) const;
  nlohmann::json to_json() const;
};

struct CheckOptions {
  double tolerance = 1e-6;
  Execution exec = Execution::parallel;
  double max_excluded_fraction = 0.01;
};

// Natural-coordinate incompressible system: momentum
//   gamma_tt - rho0 gamma_11 + J^{-T} grad_xi P / rho0
// and the constraint rho0 det J - f.
ResidualReport residual_incompressible(const Solution& sol, const GridSpec& grid, const CheckOptions& opt = {});

// Natural-coordinate compressible system: momentum, rho det J - f,
// p_t - h(p, rho) rho_t, and P - (p + rho^2 |gamma_1|^2 / 2).
ResidualReport residual_compressible(const Solution& sol, const StateFunction& h, const GridSpec& grid,
                                     const CheckOptions& opt = {});

// |rho det J - f| plus the t and xi1 derivatives of rho det J.
ResidualReport cauchy_check(const Solution& sol, const GridSpec& grid, const CheckOptions& opt = {});

// Eulerian continuity, momentum, induction and divergence equations,
// evaluated through grad_x = J^{-T} grad_xi.
ResidualReport eulerian_residual(const Solution& sol, const GridSpec& grid, const CheckOptions& opt = {});

// gamma_tt - gamma_11, the wave relation of constant-total-pressure flows.
ResidualReport wave_relation(const Solution& sol, const GridSpec& grid, const CheckOptions& opt = {});

// gamma^component += amplitude * delta(t, xi); component in 0..2.
Solution perturb(const Solution& sol, int component, const ScalarField& delta, double amplitude);
// Adds amplitude * delta to the given pressure (P or p).
Solution perturb_pressure(const Solution& sol, const ScalarField& delta, double amplitude);

}  // namespace mhdnat
