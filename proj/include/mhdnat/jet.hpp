#pragma once

#include <array>
#include <cmath>

namespace mhdnat {

// Second-order forward-mode jet over the four coordinates (t, xi1, xi2, xi3).
// Carries the value, the gradient and the packed symmetric Hessian, so any
// composition of the supported operations yields exact first and second
// partials (up to rounding).
struct Jet {
  static constexpr int kVars = 4;
  static constexpr int kPacked = 10;

  double v = 0.0;
  std::array<double, kVars> d{};
  std::array<double, kPacked> h{};

  constexpr Jet() = default;
  constexpr Jet(double value) : v(value) {}  // NOLINT: implicit constant lift

  static constexpr int packed(int a, int b) {
    if (a > b) {
      const int tmp = a;
      a = b;
      b = tmp;
    }
    return a * kVars - a * (a - 1) / 2 + (b - a);
  }

  static Jet variable(double value, int slot) {
    Jet j(value);
    j.d[slot] = 1.0;
    return j;
  }

  double hess(int a, int b) const { return h[packed(a, b)]; }
};

// Applies a scalar function with value f0 and derivatives f1, f2 to u.
inline Jet chain(const Jet& u, double f0, double f1, double f2) {
  Jet r(f0);
  for (int a = 0; a < Jet::kVars; ++a) r.d[a] = f1 * u.d[a];
  int k = 0;
  for (int a = 0; a < Jet::kVars; ++a)
    for (int b = a; b < Jet::kVars; ++b, ++k) r.h[k] = f1 * u.h[k] + f2 * u.d[a] * u.d[b];
  return r;
}

inline Jet operator-(const Jet& a) {
  Jet r(-a.v);
  for (int i = 0; i < Jet::kVars; ++i) r.d[i] = -a.d[i];
  for (int i = 0; i < Jet::kPacked; ++i) r.h[i] = -a.h[i];
  return r;
}

inline Jet& operator+=(Jet& a, const Jet& b) {
  a.v += b.v;
  for (int i = 0; i < Jet::kVars; ++i) a.d[i] += b.d[i];
  for (int i = 0; i < Jet::kPacked; ++i) a.h[i] += b.h[i];
  return a;
}

inline Jet& operator-=(Jet& a, const Jet& b) {
  a.v -= b.v;
  for (int i = 0; i < Jet::kVars; ++i) a.d[i] -= b.d[i];
  for (int i = 0; i < Jet::kPacked; ++i) a.h[i] -= b.h[i];
  return a;
}

inline Jet& operator*=(Jet& a, double s) {
  a.v *= s;
  for (int i = 0; i < Jet::kVars; ++i) a.d[i] *= s;
  for (int i = 0; i < Jet::kPacked; ++i) a.h[i] *= s;
  return a;
}

inline Jet operator+(Jet a, const Jet& b) { return a += b; }
inline Jet operator-(Jet a, const Jet& b) { return a -= b; }
inline Jet operator+(Jet a, double b) { a.v += b; return a; }
inline Jet operator+(double a, Jet b) { b.v += a; return b; }
inline Jet operator-(Jet a, double b) { a.v -= b; return a; }
inline Jet operator-(double a, const Jet& b) { return -b + a; }
inline Jet operator*(Jet a, double s) { return a *= s; }
inline Jet operator*(double s, Jet a) { return a *= s; }
inline Jet operator/(Jet a, double s) { return a *= (1.0 / s); }

inline Jet operator*(const Jet& a, const Jet& b) {
  Jet r(a.v * b.v);
  for (int i = 0; i < Jet::kVars; ++i) r.d[i] = a.d[i] * b.v + a.v * b.d[i];
  int k = 0;
  for (int i = 0; i < Jet::kVars; ++i)
    for (int j = i; j < Jet::kVars; ++j, ++k)
      r.h[k] = a.h[k] * b.v + a.v * b.h[k] + a.d[i] * b.d[j] + a.d[j] * b.d[i];
  return r;
}

inline Jet& operator*=(Jet& a, const Jet& b) { return a = a * b; }

inline Jet reciprocal(const Jet& b) {
  const double inv = 1.0 / b.v;
  return chain(b, inv, -inv * inv, 2.0 * inv * inv * inv);
}

inline Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }
inline Jet operator/(double a, const Jet& b) { return a * reciprocal(b); }

inline bool operator<(const Jet& a, const Jet& b) { return a.v < b.v; }
inline bool operator>(const Jet& a, const Jet& b) { return a.v > b.v; }

inline Jet sin(const Jet& u) {
  const double s = std::sin(u.v), c = std::cos(u.v);
  return chain(u, s, c, -s);
}
inline Jet cos(const Jet& u) {
  const double s = std::sin(u.v), c = std::cos(u.v);
  return chain(u, c, -s, -c);
}
inline Jet tan(const Jet& u) {
  const double t = std::tan(u.v), sec2 = 1.0 + t * t;
  return chain(u, t, sec2, 2.0 * t * sec2);
}
inline Jet exp(const Jet& u) {
  const double e = std::exp(u.v);
  return chain(u, e, e, e);
}
inline Jet log(const Jet& u) { return chain(u, std::log(u.v), 1.0 / u.v, -1.0 / (u.v * u.v)); }
inline Jet sqrt(const Jet& u) {
  const double s = std::sqrt(u.v);
  return chain(u, s, 0.5 / s, -0.25 / (s * u.v));
}
inline Jet sinh(const Jet& u) {
  const double s = std::sinh(u.v), c = std::cosh(u.v);
  return chain(u, s, c, s);
}
inline Jet cosh(const Jet& u) {
  const double s = std::sinh(u.v), c = std::cosh(u.v);
  return chain(u, c, s, c);
}
inline Jet tanh(const Jet& u) {
  const double t = std::tanh(u.v), s2 = 1.0 - t * t;
  return chain(u, t, s2, -2.0 * t * s2);
}
inline Jet atan(const Jet& u) {
  const double q = 1.0 / (1.0 + u.v * u.v);
  return chain(u, std::atan(u.v), q, -2.0 * u.v * q * q);
}
inline Jet asin(const Jet& u) {
  const double w = 1.0 - u.v * u.v, r = 1.0 / std::sqrt(w);
  return chain(u, std::asin(u.v), r, u.v * r / w);
}
inline Jet acos(const Jet& u) {
  const double w = 1.0 - u.v * u.v, r = 1.0 / std::sqrt(w);
  return chain(u, std::acos(u.v), -r, -u.v * r / w);
}
inline Jet abs(const Jet& u) { return u.v < 0.0 ? -u : u; }

inline Jet pow(const Jet& u, double n) {
  if (n == 0.0) return Jet(1.0);
  if (n == 1.0) return u;
  if (n == 2.0) return u * u;
  const double p2 = std::pow(u.v, n - 2.0);
  return chain(u, p2 * u.v * u.v, n * p2 * u.v, n * (n - 1.0) * p2);
}
inline Jet pow(const Jet& u, const Jet& w) { return exp(w * log(u)); }
inline Jet pow(double a, const Jet& w) { return exp(w * std::log(a)); }

inline double value_of(double x) { return x; }
inline double value_of(const Jet& x) { return x.v; }

}  // namespace mhdnat
