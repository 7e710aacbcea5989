#include "mhdnat/state_function.hpp"

#include <array>
#include <cmath>
#include <span>

#include <fmt/format.h>

#include "mhdnat/expression.hpp"

namespace mhdnat {

StateFunction::StateFunction(Fn f, std::string label, Interval p_domain, Interval rho_domain)
    : fn_(std::move(f)), label_(std::move(label)), p_domain_(p_domain), rho_domain_(rho_domain) {}

StateFunction StateFunction::parse(const std::string& text) {
  const Expression e = Expression::parse(text, {"p", "rho"});
  return StateFunction(
      [e](const Jet& p, const Jet& rho) {
        const std::array<Jet, 2> args{p, rho};
        return e.eval(std::span<const Jet>(args));
      },
      text);
}

bool StateFunction::in_domain(double p, double rho) const {
  return rho > 0.0 && p_domain_.contains(p) && rho_domain_.contains(rho);
}

StateFunction::Partials StateFunction::partials(double p, double rho) const {
  if (!in_domain(p, rho)) throw DomainError(fmt::format("state function {} evaluated outside its domain at p = {}, rho = {}", label_, p, rho));
  const Jet h = fn_(Jet::variable(p, 0), Jet::variable(rho, 1));
  if (!std::isfinite(h.v) || !std::isfinite(h.d[0]) || !std::isfinite(h.d[1]))
    throw DomainError(fmt::format("state function {} is not finite at p = {}, rho = {}", label_, p, rho));
  return {h.v, h.d[0], h.d[1]};
}

}  // namespace mhdnat
