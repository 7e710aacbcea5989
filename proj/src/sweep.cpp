#include "mhdnat/grid/sweep.hpp"

#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <stdexcept>
#include <string>

#include <fmt/format.h>
#include <omp.h>

namespace mhdnat {

std::size_t GridSpec::size() const {
  std::size_t n = 1;
  for (const auto& a : axes) n *= static_cast<std::size_t>(a.n);
  return n;
}

Point4 GridSpec::point(std::size_t index) const {
  Point4 p;
  for (int a = 3; a >= 0; --a) {
    const auto n = static_cast<std::size_t>(axes[a].n);
    p[a] = axes[a].at(static_cast<int>(index % n));
    index /= n;
  }
  return p;
}

void GridSpec::validate(const DomainBox& box) const {
  static const char* names[] = {"t", "xi1", "xi2", "xi3"};
  for (int a = 0; a < 4; ++a) {
    const auto& ax = axes[a];
    if (ax.n < 1) throw std::invalid_argument(fmt::format("grid axis {}: count must be at least 1", names[a]));
    if (ax.n >= 2 && !(ax.lo < ax.hi))
      throw std::invalid_argument(fmt::format("grid axis {}: range must satisfy lo < hi", names[a]));
    if (!std::isfinite(ax.lo) || !std::isfinite(ax.hi))
      throw std::invalid_argument(fmt::format("grid axis {}: range must be finite", names[a]));
    const double hi = ax.n == 1 ? ax.lo : ax.hi;
    if (!box.axes[a].contains(ax.lo) || !box.axes[a].contains(hi))
      throw std::invalid_argument(fmt::format("grid axis {}: range [{}, {}] leaves the domain [{}, {}]", names[a], ax.lo,
                                              hi, box.axes[a].lo, box.axes[a].hi));
  }
}

GridSpec GridSpec::uniform(const std::array<Interval, 4>& ranges, int n) {
  GridSpec g;
  for (int a = 0; a < 4; ++a) g.axes[a] = {ranges[a].lo, ranges[a].hi, n};
  return g;
}

SweepResult sweep_serial(const GridSpec& grid, std::size_t width, const PointKernel& fn) {
  SweepResult r;
  const std::size_t n = grid.size();
  r.width = width;
  r.values.assign(n * width, 0.0);
  r.excluded.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) r.excluded[i] = fn(grid.point(i), r.values.data() + i * width) ? 0 : 1;
  return r;
}

SweepResult sweep_parallel(const GridSpec& grid, std::size_t width, const PointKernel& fn) {
  SweepResult r;
  const std::size_t n = grid.size();
  r.width = width;
  r.values.assign(n * width, 0.0);
  r.excluded.assign(n, 0);
  std::exception_ptr error;
  std::size_t error_index = std::numeric_limits<std::size_t>::max();
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 64)
  for (long long k = 0; k < count; ++k) {
    const auto i = static_cast<std::size_t>(k);
    try {
      r.excluded[i] = fn(grid.point(i), r.values.data() + i * width) ? 0 : 1;
    } catch (...) {
#pragma omp critical(mhdnat_sweep_error)
      {
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
      }
    }
  }
  if (error) std::rethrow_exception(error);
  return r;
}

SweepResult sweep(const GridSpec& grid, std::size_t width, const PointKernel& fn, Execution exec) {
  return exec == Execution::serial ? sweep_serial(grid, width, fn) : sweep_parallel(grid, width, fn);
}

int configure_threads() {
  if (const char* env = std::getenv("MHDNAT_NUM_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) omp_set_num_threads(n);
  }
  return omp_get_max_threads();
}

void set_threads(int n) {
  if (n > 0) omp_set_num_threads(n);
}

}  // namespace mhdnat
