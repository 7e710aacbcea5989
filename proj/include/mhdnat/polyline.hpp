#pragma once

#include <string>
#include <vector>

#include "mhdnat/diffgeo.hpp"

namespace mhdnat {

// Ordered curve samples x(s) with their parameter values.
struct Polyline {
  std::vector<Vec3> points;
  std::vector<double> params;
  bool closed = false;
  double gap = 0.0;        // |last - first|
  bool truncated = false;  // tracing stopped early (left the domain)
  std::string note;

  std::size_t size() const { return points.size(); }
};

}  // namespace mhdnat
