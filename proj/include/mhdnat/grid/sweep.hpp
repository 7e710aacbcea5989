#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

#include "mhdnat/field.hpp"

namespace mhdnat {

struct AxisSpec {
  double lo = 0.0;
  double hi = 0.0;
  int n = 1;  // n == 1 pins the axis at lo

  double at(int i) const { return n == 1 ? lo : lo + (hi - lo) * i / (n - 1); }
};

struct GridSpec {
  std::array<AxisSpec, 4> axes{};

  std::size_t size() const;
  Point4 point(std::size_t index) const;  // row-major, t slowest
  // Throws std::invalid_argument on bad counts/ranges or points outside box.
  void validate(const DomainBox& box) const;

  static GridSpec uniform(const std::array<Interval, 4>& ranges, int n);
};

enum class Execution { serial, parallel };

// Per-point output of a sweep: `width` doubles per point plus an exclusion
// flag (set when the callback returns false).
struct SweepResult {
  std::size_t width = 0;
  std::vector<double> values;
  std::vector<unsigned char> excluded;

  std::size_t points() const { return excluded.size(); }
  const double* row(std::size_t i) const { return values.data() + i * width; }
};

using PointKernel = std::function<bool(const Point4&, double*)>;

SweepResult sweep_serial(const GridSpec& grid, std::size_t width, const PointKernel& fn);
// OpenMP over points; results land in the same per-point slots as the serial
// sweep, so any reduction done afterwards is order-independent. The first
// exception (lowest point index) is rethrown after the loop.
SweepResult sweep_parallel(const GridSpec& grid, std::size_t width, const PointKernel& fn);
SweepResult sweep(const GridSpec& grid, std::size_t width, const PointKernel& fn, Execution exec);

// Applies MHDNAT_NUM_THREADS if set; returns the thread count in use.
int configure_threads();
void set_threads(int n);

}  // namespace mhdnat
