#include "mhdnat/field_expr.hpp"

#include <span>
#include <vector>

#include "mhdnat/expression.hpp"

namespace mhdnat {

namespace {
const std::vector<std::string> kCoordinates{"t", "xi1", "xi2", "xi3"};
}

ScalarField parse_scalar_field(const std::string& text, const DomainBox& box) {
  const Expression e = Expression::parse(text, kCoordinates);
  return ScalarField(
      [e](const Point4& p) {
        const auto x = p.array();
        return std::array<double, 1>{e.eval(std::span<const double>(x))};
      },
      [e](const std::array<Jet, 4>& x) { return std::array<Jet, 1>{e.eval(std::span<const Jet>(x))}; }, box);
}

Map parse_map(const std::array<std::string, 3>& components, const DomainBox& box) {
  std::array<Expression, 3> e;
  for (int i = 0; i < 3; ++i) e[i] = Expression::parse(components[i], kCoordinates);
  return Map(
      [e](const Point4& p) {
        const auto x = p.array();
        const std::span<const double> s(x);
        return std::array<double, 3>{e[0].eval(s), e[1].eval(s), e[2].eval(s)};
      },
      [e](const std::array<Jet, 4>& x) {
        const std::span<const Jet> s(x);
        return std::array<Jet, 3>{e[0].eval(s), e[1].eval(s), e[2].eval(s)};
      },
      box);
}

}  // namespace mhdnat
