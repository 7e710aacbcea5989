#include "mhdnat/diffgeo.hpp"

#include <cmath>
#include <span>
#include <string>

#include <fmt/format.h>

namespace mhdnat {

namespace {

struct Taps {
  std::span<const double> offsets;
  std::span<const double> weights;
};

constexpr double kFirst2Off[] = {-1.0, 1.0};
constexpr double kFirst2W[] = {-0.5, 0.5};
constexpr double kFirst4Off[] = {-2.0, -1.0, 1.0, 2.0};
constexpr double kFirst4W[] = {1.0 / 12.0, -8.0 / 12.0, 8.0 / 12.0, -1.0 / 12.0};
constexpr double kSecond2Off[] = {-1.0, 0.0, 1.0};
constexpr double kSecond2W[] = {1.0, -2.0, 1.0};
constexpr double kSecond4Off[] = {-2.0, -1.0, 0.0, 1.0, 2.0};
constexpr double kSecond4W[] = {-1.0 / 12.0, 16.0 / 12.0, -30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0};

Taps first_taps(int order) {
  return order == 2 ? Taps{kFirst2Off, kFirst2W} : Taps{kFirst4Off, kFirst4W};
}
Taps second_taps(int order) {
  return order == 2 ? Taps{kSecond2Off, kSecond2W} : Taps{kSecond4Off, kSecond4W};
}

template <int N>
class FiniteDifference {
 public:
  using Value = std::array<double, N>;

  FiniteDifference(const Field<N>& f, const Point4& p, const StencilConfig& cfg) : f_(f), p_(p), cfg_(cfg) {
    cfg.validate();
    for (int a = 0; a < 4; ++a) h_[a] = cfg.h(p[a]);
    center_ = eval(p);
  }

  void require_inside(int a) const {
    const double margin = cfg_.reach() * h_[a];
    if (!f_.domain().axes[a].contains(p_[a], margin))
      throw DomainError(fmt::format("point too close to the domain boundary on axis {} (coordinate {}, stencil reach {})",
                                    a, p_[a], margin));
  }

  const Value& center() const { return center_; }

  Value first(int a) const { return extrapolate([&](double s) { return first_at(a, s); }); }
  Value second(int a) const { return extrapolate([&](double s) { return second_at(a, s); }); }
  Value mixed(int a, int b) const { return extrapolate([&](double s) { return mixed_at(a, b, s); }); }

 private:
  Value eval(const Point4& q) const {
    Value v = f_(q);
    for (double x : v)
      if (!std::isfinite(x))
        throw DomainError(fmt::format("non-finite field value at ({}, {}, {}, {})", q.t, q.xi1, q.xi2, q.xi3));
    return v;
  }

  template <class D>
  Value extrapolate(D&& d) const {
    Value coarse = d(1.0);
    if (!cfg_.richardson) return coarse;
    Value fine = d(0.5);
    const double w = std::pow(2.0, cfg_.order);
    for (int i = 0; i < N; ++i) coarse[i] = (w * fine[i] - coarse[i]) / (w - 1.0);
    return coarse;
  }

  Value first_at(int a, double s) const {
    const Taps taps = first_taps(cfg_.order);
    const double h = h_[a] * s;
    Value out{};
    for (std::size_t k = 0; k < taps.offsets.size(); ++k) {
      Point4 q = p_;
      q[a] += taps.offsets[k] * h;
      const Value v = eval(q);
      for (int i = 0; i < N; ++i) out[i] += taps.weights[k] * v[i];
    }
    for (int i = 0; i < N; ++i) out[i] /= h;
    return out;
  }

  Value second_at(int a, double s) const {
    const Taps taps = second_taps(cfg_.order);
    const double h = h_[a] * s;
    Value out{};
    for (std::size_t k = 0; k < taps.offsets.size(); ++k) {
      Value v;
      if (taps.offsets[k] == 0.0) {
        v = center_;
      } else {
        Point4 q = p_;
        q[a] += taps.offsets[k] * h;
        v = eval(q);
      }
      for (int i = 0; i < N; ++i) out[i] += taps.weights[k] * v[i];
    }
    for (int i = 0; i < N; ++i) out[i] /= h * h;
    return out;
  }

  Value mixed_at(int a, int b, double s) const {
    const Taps taps = first_taps(cfg_.order);
    const double ha = h_[a] * s, hb = h_[b] * s;
    Value out{};
    for (std::size_t k = 0; k < taps.offsets.size(); ++k) {
      for (std::size_t l = 0; l < taps.offsets.size(); ++l) {
        Point4 q = p_;
        q[a] += taps.offsets[k] * ha;
        q[b] += taps.offsets[l] * hb;
        const Value v = eval(q);
        const double w = taps.weights[k] * taps.weights[l];
        for (int i = 0; i < N; ++i) out[i] += w * v[i];
      }
    }
    for (int i = 0; i < N; ++i) out[i] /= ha * hb;
    return out;
  }

  const Field<N>& f_;
  Point4 p_;
  StencilConfig cfg_;
  std::array<double, 4> h_{};
  Value center_{};
};

}  // namespace

template <int N>
FieldDerivs<N> derivatives(const Field<N>& field, const Point4& at, const DiffOptions& opt, unsigned second_mask) {
  FieldDerivs<N> out;
  if (!at.finite()) throw DomainError("non-finite evaluation point");
  if (opt.mode == DerivativeMode::closed_form && field.has_jet()) {
    if (!field.domain().contains(at))
      throw DomainError(fmt::format("point ({}, {}, {}, {}) outside the domain box", at.t, at.xi1, at.xi2, at.xi3));
    const auto jets = field(seed_jets(at));
    for (int i = 0; i < N; ++i) {
      out.value[i] = jets[i].v;
      for (int a = 0; a < 4; ++a) {
        out.d1[a][i] = jets[i].d[a];
        for (int b = 0; b < 4; ++b) out.d2[a][b][i] = jets[i].hess(a, b);
      }
      if (!std::isfinite(jets[i].v))
        throw DomainError(fmt::format("non-finite field value at ({}, {}, {}, {})", at.t, at.xi1, at.xi2, at.xi3));
    }
    out.mode = DerivativeMode::closed_form;
    return out;
  }
  FiniteDifference<N> fd(field, at, opt.stencil);
  for (int a = 0; a < 4; ++a) fd.require_inside(a);
  out.value = fd.center();
  for (int a = 0; a < 4; ++a) out.d1[a] = fd.first(a);
  for (int a = 0; a < 4; ++a) {
    for (int b = a; b < 4; ++b) {
      if (!(second_mask & second_bit(a, b))) continue;
      out.d2[a][b] = a == b ? fd.second(a) : fd.mixed(a, b);
      out.d2[b][a] = out.d2[a][b];
    }
  }
  out.mode = DerivativeMode::finite_difference;
  return out;
}

template FieldDerivs<1> derivatives<1>(const Field<1>&, const Point4&, const DiffOptions&, unsigned);
template FieldDerivs<3> derivatives<3>(const Field<3>&, const Point4&, const DiffOptions&, unsigned);

Vec3 partial(const Map& map, const Point4& at, int dir, int order, const DiffOptions& opt) {
  if (dir < 0 || dir > 3) throw std::invalid_argument("direction must be in 0..3");
  if (order != 1 && order != 2) throw std::invalid_argument("derivative order must be 1 or 2");
  if (opt.mode == DerivativeMode::closed_form && map.has_jet()) {
    const auto d = derivatives(map, at, opt);
    return order == 1 ? vec(d.d1[dir]) : vec(d.d2[dir][dir]);
  }
  FiniteDifference<3> fd(map, at, opt.stencil);
  fd.require_inside(dir);
  return order == 1 ? vec(fd.first(dir)) : vec(fd.second(dir));
}

Vec3 mixed_partial(const Map& map, const Point4& at, int a, int b, const DiffOptions& opt) {
  if (a < 0 || a > 3 || b < 0 || b > 3) throw std::invalid_argument("direction must be in 0..3");
  if (a == b) return partial(map, at, a, 2, opt);
  if (opt.mode == DerivativeMode::closed_form && map.has_jet()) return vec(derivatives(map, at, opt).d2[a][b]);
  FiniteDifference<3> fd(map, at, opt.stencil);
  fd.require_inside(a);
  fd.require_inside(b);
  return vec(fd.mixed(a, b));
}

Mat3 spatial_jacobian(const FieldDerivs<3>& d) {
  Mat3 J;
  for (int i = 0; i < 3; ++i) J.col(i) = vec(d.d1[i + 1]);
  return J;
}

bool is_singular(const Mat3& J, double det) {
  const double scale = J.col(0).norm() * J.col(1).norm() * J.col(2).norm();
  return !(std::abs(det) > 1e-12 * scale) || scale == 0.0;
}

JacobianResult jacobian(const Map& map, const Point4& at, const DiffOptions& opt) {
  JacobianResult r;
  const auto d = derivatives(map, at, opt, kNoSecond);
  r.J = spatial_jacobian(d);
  r.det = r.J.determinant();
  return r;
}

MetricTensor metric_from(const FieldDerivs<3>& d) {
  const Mat3 J = spatial_jacobian(d);
  const double det = J.determinant();
  if (is_singular(J, det)) throw SingularError("singular metric: Jacobian determinant vanishes");
  std::array<Vec3, 4> e;
  for (int a = 0; a < 4; ++a) e[a] = vec(d.d1[a]);
  MetricTensor m;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) m.g(a, b) = (a == 0 && b == 0 ? 1.0 : 0.0) + e[a].dot(e[b]);
  m.g_inv = m.g.inverse();
  m.det_g = m.g.determinant();
  return m;
}

MetricTensor metric(const Map& map, const Point4& at, const DiffOptions& opt) {
  return metric_from(derivatives(map, at, opt, kNoSecond));
}

double ChristoffelField::trace(int a) const {
  double s = 0.0;
  for (int b = 0; b < 4; ++b) s += gamma[b](a, b);
  return s;
}

ChristoffelField christoffel_from(const FieldDerivs<3>& d) {
  const MetricTensor m = metric_from(d);
  // Spatial parts of the basis vectors and their derivatives; the time
  // component of every basis vector is constant.
  std::array<Vec3, 4> e;
  for (int a = 0; a < 4; ++a) e[a] = vec(d.d1[a]);
  auto de = [&](int a, int b) { return vec(d.d2[a][b]); };
  // dg[c](a, b) = d g_ab / d xi^c
  std::array<Mat4, 4> dg;
  for (int c = 0; c < 4; ++c)
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) dg[c](a, b) = de(a, c).dot(e[b]) + e[a].dot(de(b, c));
  ChristoffelField out;
  for (int c = 0; c < 4; ++c) {
    for (int a = 0; a < 4; ++a) {
      for (int b = a; b < 4; ++b) {
        double s = 0.0;
        for (int k = 0; k < 4; ++k) s += m.g_inv(c, k) * (dg[b](a, k) + dg[a](b, k) - dg[k](a, b));
        out.gamma[c](a, b) = 0.5 * s;
        out.gamma[c](b, a) = 0.5 * s;
      }
    }
  }
  return out;
}

ChristoffelField christoffel(const Map& map, const Point4& at, const DiffOptions& opt) {
  return christoffel_from(derivatives(map, at, opt));
}

}  // namespace mhdnat
