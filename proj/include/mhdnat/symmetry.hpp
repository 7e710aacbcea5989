#pragma once

#include <array>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mhdnat/scalar_fn.hpp"
#include "mhdnat/solution.hpp"
#include "mhdnat/state_function.hpp"

namespace mhdnat {

// gamma'(t, xi) = gamma(t - dt, xi).
struct TimeShift {
  double dt = 0.0;
};

// gamma' = R gamma, R the rotation about `axis` by `angle`.
struct Rotation {
  Vec3 axis = Vec3::UnitZ();
  double angle = 0.0;
};

// (t, xi, gamma) -> e^eps (t, xi, gamma).
struct Dilation1 {
  double eps = 0.0;
};

// (xi2, xi3, gamma, P) -> (e^{3 eps} xi2, e^{3 eps} xi3, e^{2 eps} gamma, e^{4 eps} P).
struct Dilation2 {
  double eps = 0.0;
};

// gamma' = gamma + alpha(t), P' = P - rho0 (gamma . alpha'' + alpha . alpha'' / 2).
// Components are expressions in t so alpha'' is available symbolically.
struct GeneralizedGalilean {
  std::array<ScalarFn1, 3> alpha;
};

// P' = P + beta(t).
struct PressureShift {
  ScalarFn1 beta;
};

// Substitution written from the new coordinates to the old ones:
//   xi1 = xi1' + a(xi2', xi3'),  (xi2, xi3) = (eta2, eta3)(xi2', xi3'),
// with d(eta2, eta3)/d(xi2', xi3') = 1. f'(xi') = f(eta(xi')).
struct Reparametrization {
  ScalarFn2 a;
  ScalarFn2 eta2, eta3;
  std::optional<DomainBox> box;  // new domain; defaults to the old one
};

// (xi2, xi3) = (eta2, eta3)(xi2', xi3') with a nonvanishing Jacobian Delta;
// f'(xi') = f(eta(xi')) Delta(xi').
struct CauchyEquivalence {
  ScalarFn2 eta2, eta3;
  std::optional<DomainBox> box;
};

using Transform = std::variant<TimeShift, Rotation, Dilation1, Dilation2, GeneralizedGalilean, PressureShift,
                               Reparametrization, CauchyEquivalence>;

class TransformError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

Solution apply(const Transform& tr, const Solution& sol);

// Ordered list of transforms applied left to right.
class Pipeline {
 public:
  Pipeline() = default;
  explicit Pipeline(std::vector<Transform> steps) : steps_(std::move(steps)) {}

  Solution operator()(const Solution& sol) const;
  const std::vector<Transform>& steps() const { return steps_; }
  Pipeline then(const Pipeline& next) const;

 private:
  std::vector<Transform> steps_;
};

Pipeline compose(std::vector<Transform> trs);

std::string name_of(const Transform& tr);

// Equivalence transformation of the compressible system with constants
// alpha, beta, kappa (alpha, beta nonzero).
struct CompressibleEquivalence {
  double alpha = 1.0;
  double beta = 1.0;
  double kappa = 0.0;

  void validate() const;
  double pressure_scale() const;  // alpha^-8 beta^4
  double density_scale() const;   // alpha^-6
  double time_scale() const;      // alpha^3
  double xi1_scale() const;       // 1
  double xi_scale() const;        // beta^3 (xi2, xi3)
  double gamma_scale() const;     // alpha^2 beta^2
};

// h'(p', rho') = alpha^-2 beta^4 h(alpha^8 beta^-4 (p' - kappa), alpha^6 rho').
StateFunction apply_equiv_h(const CompressibleEquivalence& tr, const StateFunction& h);

// Maps a compressible solution with the scalings above; pairs with apply_equiv_h.
Solution apply_equiv(const CompressibleEquivalence& tr, const Solution& sol);

}  // namespace mhdnat
