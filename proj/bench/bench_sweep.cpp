// Serial reference vs OpenMP sweeps for the main grid kernels.
// Threads follow MHDNAT_NUM_THREADS (or OMP_NUM_THREADS).
#include <numbers>

#include <benchmark/benchmark.h>

#include "mhdnat/families.hpp"
#include "mhdnat/fieldline.hpp"
#include "mhdnat/geometry.hpp"

using namespace mhdnat;

namespace {

constexpr double kPi = std::numbers::pi;

const Solution& knot() {
  static const Solution s = build_torus_knot(sol14_params());
  return s;
}

Execution exec_of(const benchmark::State& st) { return st.range(0) ? Execution::parallel : Execution::serial; }

void BM_ResidualIncompressible(benchmark::State& st) {
  const GridSpec g =
      GridSpec::uniform({Interval{0.0, 1.0}, Interval{0.0, 2 * kPi}, Interval{0.0, 2 * kPi}, Interval{0.5, 1.0}},
                        static_cast<int>(st.range(1)));
  CheckOptions opt;
  opt.exec = exec_of(st);
  for (auto _ : st) benchmark::DoNotOptimize(residual_incompressible(knot(), g, opt).max_norm());
  st.SetItemsProcessed(static_cast<int64_t>(st.iterations() * g.size()));
}

void BM_ResidualFiniteDifference(benchmark::State& st) {
  Solution s = knot();
  s.diff.mode = DerivativeMode::finite_difference;
  const GridSpec g =
      GridSpec::uniform({Interval{0.0, 1.0}, Interval{0.0, 2 * kPi}, Interval{0.0, 2 * kPi}, Interval{0.5, 1.0}},
                        static_cast<int>(st.range(1)));
  CheckOptions opt;
  opt.exec = exec_of(st);
  for (auto _ : st) benchmark::DoNotOptimize(residual_incompressible(s, g, opt).max_norm());
  st.SetItemsProcessed(static_cast<int64_t>(st.iterations() * g.size()));
}

void BM_InitialMap(benchmark::State& st) {
  const Box3 box{Interval{-3, 3}, Interval{-3, 3}, Interval{-3, 3}};
  const auto data = EulerianInitialData::parse({"-y", "x", "0"}, "1", {"0", "0", "0"}, box);
  const auto seed = SeedSurface::parse({"xi3", "0", "xi2"});
  const Grid3 g{AxisSpec{0.0, 2 * kPi, 65}, AxisSpec{-0.5, 0.5, static_cast<int>(st.range(1))},
                AxisSpec{0.5, 1.5, static_cast<int>(st.range(1))}};
  for (auto _ : st) benchmark::DoNotOptimize(build_initial_map(data, seed, g, {}, exec_of(st)).f_variation);
}

void BM_SurfaceMesh(benchmark::State& st) {
  SurfaceOptions opt;
  opt.exec = exec_of(st);
  const CellAxis a{0.0, 2 * kPi, static_cast<int>(st.range(1))};
  for (auto _ : st) benchmark::DoNotOptimize(sample_surface(knot(), 0.0, FixAxis::xi3, 1.0, a, a, opt).quads.size());
}

}  // namespace

BENCHMARK(BM_ResidualIncompressible)->ArgsProduct({{0, 1}, {9, 17}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ResidualFiniteDifference)->ArgsProduct({{0, 1}, {9}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_InitialMap)->ArgsProduct({{0, 1}, {5, 9}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SurfaceMesh)->ArgsProduct({{0, 1}, {64, 128}})->Unit(benchmark::kMillisecond);

int main(int argc, char** argv) {
  configure_threads();
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
