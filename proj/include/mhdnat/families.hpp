#pragma once

#include <array>
#include <stdexcept>
#include <string>

#include "mhdnat/scalar_fn.hpp"
#include "mhdnat/solution.hpp"

namespace mhdnat {

class FamilyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shared settings for the family constructors. Free functions of mu use the
// variable name "mu", disturbances use "s" (= t - xi1), two-argument shape
// functions use "xi2", "xi3" and the dim2 profiles use "mu", "lambda".
struct FamilyOptions {
  DomainBox box = default_box();
  double P0 = 1.0;
  DiffOptions diff{};
  double check_tolerance = 1e-8;  // consistency checks on the construction grid
  int check_points = 9;           // per axis

  static DomainBox default_box();
};

// Vector function tau(mu, xi2, xi3).
using VectorFn3 = std::array<ScalarFn3, 3>;

struct Dim3Params {
  ScalarFn3 tau1, tau2;  // (mu, xi2, xi3)
  ScalarFn1 tau3;        // (mu)
  ScalarFn1 u1 = ScalarFn1::constant(0.0), u2 = ScalarFn1::constant(0.0);  // (s)
};

struct JetParams {
  ScalarFn2 A, B;  // (xi2, xi3)
  ScalarFn1 alpha = ScalarFn1::constant(1.0), beta = ScalarFn1::constant(1.0);
  ScalarFn1 a = ScalarFn1::constant(0.0), b = ScalarFn1::constant(0.0), phi = ScalarFn1::constant(0.0);
  ScalarFn1 u1 = ScalarFn1::constant(0.0), u2 = ScalarFn1::constant(0.0);
};

struct Dim2Params {
  ScalarFn3 tau1;        // (mu, xi2, xi3)
  ScalarFn3 lambda;      // (mu, xi2, xi3)
  ScalarFn2 tau2, tau3;  // (mu, lambda)
  ScalarFn1 u = ScalarFn1::constant(0.0);
};

struct TorusKnotParams {
  ScalarFn2 A, B;  // (xi2, xi3)
  ScalarFn1 phi, a, b;
  double k = 2.0;
  ScalarFn1 u = ScalarFn1::constant(0.0);
  double delta = 1e-3;  // required margin min(b - |B|)
};

// gamma = xi, rho = 1, P = P0, f = 1.
Solution build_static(const FamilyOptions& opt = {});

// gamma = tau(t + xi1, xi2, xi3) with det(d tau) = 1; f = 1.
Solution build_field_aligned(const VectorFn3& tau, const FamilyOptions& opt = {});

// gamma = (u1(s) + tau1, u2(s) + tau2, tau3(mu)). f is derived from
// tau3' d(tau1, tau2)/d(xi2, xi3) and must not depend on mu; an explicit f,
// when given, must agree with it.
Solution build_dim3(const Dim3Params& p, const FamilyOptions& opt = {}, const ScalarFn2* f = nullptr);

// Jet family; tau3 = integral of 1/(alpha beta) from 0, f = d(A, B)/d(xi2, xi3).
Solution build_jet(const JetParams& p, const FamilyOptions& opt = {});

// gamma = (u(s) + tau1, tau2(mu, lambda), tau3(mu, lambda)); f is the product
// |tau2_mu tau2_lambda; tau3_mu tau3_lambda| |lambda_2 lambda_3; tau1_2 tau1_3|.
Solution build_dim2(const Dim2Params& p, const FamilyOptions& opt = {}, const ScalarFn2* f = nullptr);

// tau1 = a + B sin(phi + A), lambda = sqrt(b + B cos(phi + A)),
// tau2 = lambda cos(k mu), tau3 = lambda sin(k mu); f = (k B / 2) d(A, B)/d(xi2, xi3).
Solution build_torus_knot(const TorusKnotParams& p, const FamilyOptions& opt = {});
Dim2Params torus_knot_as_dim2(const TorusKnotParams& p);

TorusKnotParams sol13_params();
TorusKnotParams sol14_params();

// Antiderivative of 1/(alpha beta) with tau3(0) = 0 on [lo, hi]: adaptive
// Simpson per node interval, cubic Hermite interpolation between nodes using
// the exact integrand as slope. Jets carry the exact derivative 1/(alpha beta).
ScalarFn1 integrate_reciprocal(const ScalarFn1& alpha, const ScalarFn1& beta, double lo, double hi,
                               int nodes = 4096, double tolerance = 1e-10);

// Range of mu = t + xi1 over a box.
Interval mu_range(const DomainBox& box);

}  // namespace mhdnat
