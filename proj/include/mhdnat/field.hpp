#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include "mhdnat/jet.hpp"

namespace mhdnat {

// Point in (t, xi1, xi2, xi3); index 0 is t.
struct Point4 {
  double t = 0.0, xi1 = 0.0, xi2 = 0.0, xi3 = 0.0;

  double operator[](int i) const {
    switch (i) {
      case 0: return t;
      case 1: return xi1;
      case 2: return xi2;
      default: return xi3;
    }
  }
  double& operator[](int i) {
    switch (i) {
      case 0: return t;
      case 1: return xi1;
      case 2: return xi2;
      default: return xi3;
    }
  }
  std::array<double, 4> array() const { return {t, xi1, xi2, xi3}; }
  bool finite() const { return std::isfinite(t) && std::isfinite(xi1) && std::isfinite(xi2) && std::isfinite(xi3); }
};

struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool contains(double x, double margin = 0.0) const { return x - margin >= lo && x + margin <= hi; }
  bool bounded() const { return std::isfinite(lo) && std::isfinite(hi); }
};

struct DomainBox {
  std::array<Interval, 4> axes{};

  static DomainBox unbounded() { return {}; }
  bool contains(const Point4& p, const std::array<double, 4>& margin = {}) const {
    for (int a = 0; a < 4; ++a)
      if (!axes[a].contains(p[a], margin[a])) return false;
    return true;
  }
  bool nonempty() const {
    for (const auto& ax : axes)
      if (!(ax.lo < ax.hi)) return false;
    return true;
  }
};

class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class DerivativeMode { closed_form, finite_difference };

inline const char* to_string(DerivativeMode m) {
  return m == DerivativeMode::closed_form ? "closed_form" : "finite_difference";
}

struct StencilConfig {
  int order = 4;       // 2 or 4
  double step = 1e-3;  // relative: h = step * max(1, |x|)
  bool richardson = false;

  void validate() const {
    if (order != 2 && order != 4) throw std::invalid_argument("stencil order must be 2 or 4");
    if (!(step > 0.0)) throw std::invalid_argument("stencil step must be positive");
  }
  double h(double x) const { return step * std::max(1.0, std::abs(x)); }
  // Largest offset (in units of h) touched by a derivative evaluation.
  double reach() const { return order / 2.0; }
};

// Smooth map (t, xi) -> R^N. The value path is mandatory; the jet path, when
// present, gives closed-form first and second partials.
template <int N>
class Field {
 public:
  using Value = std::array<double, N>;
  using JetValue = std::array<Jet, N>;
  using ValueFn = std::function<Value(const Point4&)>;
  using JetFn = std::function<JetValue(const std::array<Jet, 4>&)>;

  Field() : Field(constant(Value{})) {}
  Field(ValueFn value, JetFn jet, DomainBox box = DomainBox::unbounded())
      : value_(std::move(value)), jet_(std::move(jet)), box_(box) {}

  // f(const std::array<T, 4>&) -> std::array<T, N> for T = double and T = Jet.
  template <class F>
  static Field generic(F f, DomainBox box = DomainBox::unbounded()) {
    return Field([f](const Point4& p) -> Value { return f(p.array()); },
                 [f](const std::array<Jet, 4>& x) -> JetValue { return f(x); }, box);
  }

  static Field constant(Value c, DomainBox box = DomainBox::unbounded()) {
    return Field([c](const Point4&) { return c; },
                 [c](const std::array<Jet, 4>&) {
                   JetValue r;
                   for (int i = 0; i < N; ++i) r[i] = Jet(c[i]);
                   return r;
                 },
                 box);
  }

  Value operator()(const Point4& p) const { return value_(p); }
  JetValue operator()(const std::array<Jet, 4>& x) const {
    if (!jet_) throw std::logic_error("field has no closed-form derivatives");
    return jet_(x);
  }

  bool has_jet() const { return static_cast<bool>(jet_); }
  const DomainBox& domain() const { return box_; }
  Field with_domain(const DomainBox& box) const { return Field(value_, jet_, box); }
  Field without_jet() const { return Field(value_, {}, box_); }

 private:
  ValueFn value_;
  JetFn jet_;
  DomainBox box_;
};

using Map = Field<3>;
using ScalarField = Field<1>;

inline std::array<Jet, 4> seed_jets(const Point4& p) {
  return {Jet::variable(p.t, 0), Jet::variable(p.xi1, 1), Jet::variable(p.xi2, 2), Jet::variable(p.xi3, 3)};
}

}  // namespace mhdnat
