#pragma once

#include <array>

#include <Eigen/Dense>

#include "mhdnat/field.hpp"

namespace mhdnat {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

struct DiffOptions {
  DerivativeMode mode = DerivativeMode::closed_form;
  StencilConfig stencil{};
};

class SingularError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Value, gradient and Hessian of a field at one point.
template <int N>
struct FieldDerivs {
  using Value = std::array<double, N>;
  Value value{};
  std::array<Value, 4> d1{};
  std::array<std::array<Value, 4>, 4> d2{};
  DerivativeMode mode = DerivativeMode::closed_form;  // path actually used
};

// Bit mask over the ten unordered second-derivative pairs.
constexpr unsigned second_bit(int a, int b) { return 1u << Jet::packed(a, b); }
constexpr unsigned kAllSecond = 0x3FFu;
constexpr unsigned kNoSecond = 0u;

// Closed-form when the field carries jets and the mode asks for it,
// otherwise central finite differences (entries outside the mask stay zero).
template <int N>
FieldDerivs<N> derivatives(const Field<N>& field, const Point4& at, const DiffOptions& opt,
                           unsigned second_mask = kAllSecond);

extern template FieldDerivs<1> derivatives<1>(const Field<1>&, const Point4&, const DiffOptions&, unsigned);
extern template FieldDerivs<3> derivatives<3>(const Field<3>&, const Point4&, const DiffOptions&, unsigned);

inline Vec3 vec(const std::array<double, 3>& a) { return {a[0], a[1], a[2]}; }

// d/dxi^dir (order 1) or d^2/dxi^dir^2 (order 2).
Vec3 partial(const Map& map, const Point4& at, int dir, int order, const DiffOptions& opt = {});
Vec3 mixed_partial(const Map& map, const Point4& at, int a, int b, const DiffOptions& opt = {});

struct JacobianResult {
  Mat3 J;  // columns d gamma / d xi^i
  double det = 0.0;
};

JacobianResult jacobian(const Map& map, const Point4& at, const DiffOptions& opt = {});
Mat3 spatial_jacobian(const FieldDerivs<3>& d);

// |det J| below 1e-12 times the product of column lengths.
bool is_singular(const Mat3& J, double det);

struct MetricTensor {
  Mat4 g;
  Mat4 g_inv;
  double det_g = 0.0;
};

MetricTensor metric(const Map& map, const Point4& at, const DiffOptions& opt = {});
MetricTensor metric_from(const FieldDerivs<3>& d);

// gamma[c](a, b) = Gamma^c_{ab}, Greek indices 0..3 with index 0 = t.
struct ChristoffelField {
  std::array<Mat4, 4> gamma;
  double operator()(int c, int a, int b) const { return gamma[c](a, b); }
  // Gamma^b_{ab} summed over b.
  double trace(int a) const;
};

ChristoffelField christoffel(const Map& map, const Point4& at, const DiffOptions& opt = {});
ChristoffelField christoffel_from(const FieldDerivs<3>& d);

}  // namespace mhdnat
