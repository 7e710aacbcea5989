#pragma once

#include <array>
#include <string>

#include "mhdnat/field.hpp"

namespace mhdnat {

// Fields written in the expression grammar over the variables t, xi1, xi2, xi3.
ScalarField parse_scalar_field(const std::string& text, const DomainBox& box = DomainBox::unbounded());
Map parse_map(const std::array<std::string, 3>& components, const DomainBox& box = DomainBox::unbounded());

}  // namespace mhdnat
