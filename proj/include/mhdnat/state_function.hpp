#pragma once

#include <functional>
#include <limits>
#include <string>

#include "mhdnat/field.hpp"
#include "mhdnat/jet.hpp"

namespace mhdnat {

// h(p, rho), the squared sound speed of a compressible state equation.
// Partials come from jets (p in slot 0, rho in slot 1).
class StateFunction {
 public:
  using Fn = std::function<Jet(const Jet& p, const Jet& rho)>;

  struct Partials {
    double h = 0.0;
    double h_p = 0.0;
    double h_rho = 0.0;
  };

  StateFunction() = default;
  StateFunction(Fn f, std::string label, Interval p_domain = {},
                Interval rho_domain = {0.0, std::numeric_limits<double>::infinity()});

  // Expression in the variables p and rho.
  static StateFunction parse(const std::string& text);

  double operator()(double p, double rho) const { return partials(p, rho).h; }
  Partials partials(double p, double rho) const;  // throws DomainError outside the validity box
  Jet operator()(const Jet& p, const Jet& rho) const { return fn_(p, rho); }

  bool in_domain(double p, double rho) const;
  const std::string& label() const { return label_; }
  const Interval& p_domain() const { return p_domain_; }
  const Interval& rho_domain() const { return rho_domain_; }
  explicit operator bool() const { return static_cast<bool>(fn_); }

 private:
  Fn fn_;
  std::string label_;
  Interval p_domain_;
  Interval rho_domain_;
};

}  // namespace mhdnat
