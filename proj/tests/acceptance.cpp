// Acceptance run: one PASS/FAIL line per criterion. `acceptance --only N`
// runs a single criterion. Exit status 0 iff every selected criterion passed.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <fmt/format.h>

#include "mhdnat/classification.hpp"
#include "mhdnat/export.hpp"
#include "mhdnat/families.hpp"
#include "mhdnat/fieldline.hpp"
#include "mhdnat/geometry.hpp"
#include "mhdnat/symmetry.hpp"

using namespace mhdnat;

namespace {

constexpr double kPi = std::numbers::pi;

// Pinned thresholds.
constexpr double kExactTol = 1e-6;        // closed-form residuals (C1, C2, C4)
constexpr double kFdTol = 1e-4;           // finite-difference residuals (C1, C2)
constexpr int kGridN = 17;                // points per axis of the 17^4 grid
constexpr double kInstanceSeconds = 30;   // C1, per instance
constexpr double kWaveTol = 1e-8;         // C3
constexpr double kDilationTol = 1e-10;    // C4
constexpr double kRowTol = 1e-10;         // C5
constexpr double kNegativeMin = 1e-2;     // C5
constexpr int kRowSamples = 1000;         // C5
constexpr double kClassifySeconds = 10;   // C5
constexpr double kInitialMapTol = 1e-5;   // C6
constexpr double kClosureGap = 1e-9;      // C7
constexpr double kLinkDeviation = 1e-2;   // C7
constexpr double kTopologySeconds = 20;   // C7

struct Outcome {
  bool passed = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED ") + what;
    passed = passed && ok;
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + ("info " + what); }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

GridSpec paper_grid() {
  return GridSpec::uniform({Interval{0.0, 1.0}, Interval{0.0, 2 * kPi}, Interval{0.0, 2 * kPi}, Interval{0.5, 1.0}},
                           kGridN);
}

// Grid of n points per axis on the inner 80% of a box.
GridSpec interior_grid(const DomainBox& box, int n) {
  std::array<Interval, 4> r;
  for (int a = 0; a < 4; ++a) {
    const auto& ax = box.axes[a];
    const double w = ax.hi - ax.lo;
    r[a] = {ax.lo + 0.1 * w, ax.hi - 0.1 * w};
  }
  return GridSpec::uniform(r, n);
}

// Worst max-norm of the residual suite (incompressible, eulerian, cauchy).
double suite_max(const Solution& s, const GridSpec& g, double tol, bool* passed) {
  CheckOptions opt;
  opt.tolerance = tol;
  const ResidualReport r[] = {residual_incompressible(s, g, opt), eulerian_residual(s, g, opt), cauchy_check(s, g, opt)};
  double worst = 0.0;
  *passed = true;
  for (const auto& x : r) {
    worst = std::max(worst, x.max_norm());
    *passed = *passed && x.passed;
  }
  return worst;
}

void run_suite(Outcome& o, const std::string& label, Solution s, const GridSpec& g) {
  bool ok = false;
  const double cf = suite_max(s, g, kExactTol, &ok);
  o.require(ok, fmt::format("{} closed-form max {:.2e}", label, cf));
  s.diff.mode = DerivativeMode::finite_difference;
  const double fd = suite_max(s, g, kFdTol, &ok);
  o.require(ok, fmt::format("{} FD max {:.2e}", label, fd));
}

ScalarFn1 f1(const std::string& s, const char* var = "mu") { return ScalarFn1::parse(s, {var}); }
ScalarFn2 f2(const std::string& s) { return ScalarFn2::parse(s, {"xi2", "xi3"}); }
ScalarFn3 f3(const std::string& s) { return ScalarFn3::parse(s, {"mu", "xi2", "xi3"}); }

// Coefficient with magnitude in [0.2, 0.5] and random sign; keeps disturbances nonzero.
double nonzero(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> m(0.2, 0.5);
  std::bernoulli_distribution sign(0.5);
  return sign(rng) ? m(rng) : -m(rng);
}

JetParams draw_jet(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.4, 0.4);
  JetParams p;
  p.A = f2(fmt::format("xi2 + {:.6f}*sin(xi3)", u(rng)));
  p.B = f2(fmt::format("xi3 + {:.6f}*cos(xi2)", u(rng)));
  p.alpha = f1(fmt::format("1.5 + {:.6f}*cos(mu)", u(rng)));
  p.beta = f1(fmt::format("1 + {:.6f}*sin(2*mu)", u(rng)));
  p.a = f1(fmt::format("{:.6f}*mu", u(rng)));
  p.b = f1(fmt::format("{:.6f}*cos(mu)", u(rng)));
  p.phi = f1(fmt::format("{:.6f}*mu", 2 * u(rng)));
  p.u1 = f1(fmt::format("{:.6f}*sin(s)", nonzero(rng)), "s");
  p.u2 = f1(fmt::format("{:.6f}*s^2", nonzero(rng)), "s");
  return p;
}

TorusKnotParams draw_torus_knot(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.4, 0.4);
  std::uniform_int_distribution<int> m(1, 3);
  TorusKnotParams p;
  p.A = f2(fmt::format("xi2 + {:.6f}*sin(xi3)", u(rng)));
  p.B = f2("xi3");
  p.phi = f1(fmt::format("{}*mu", m(rng)));
  p.a = f1(fmt::format("{:.6f}*sin(mu)", u(rng)));
  p.b = f1(fmt::format("2 + {:.6f}*cos(mu)", u(rng)));
  p.k = m(rng);
  p.u = f1(fmt::format("{:.6f}*cos(s)", nonzero(rng)), "s");
  return p;
}

const Solution& sol13() {
  static const Solution s = build_torus_knot(sol13_params());
  return s;
}

Outcome c1() {
  Outcome o;
  const GridSpec g = paper_grid();
  for (const auto& [label, params] : {std::pair{"sol13", sol13_params()}, std::pair{"sol14", sol14_params()}}) {
    const auto t0 = std::chrono::steady_clock::now();
    run_suite(o, label, build_torus_knot(params), g);
    const double dt = seconds_since(t0);
    o.require(dt <= kInstanceSeconds, fmt::format("{} {:.1f} s", label, dt));
  }
  return o;
}

Outcome c2() {
  Outcome o;
  const GridSpec g = paper_grid();
  std::mt19937_64 rng(20240607);
  for (int i = 0; i < 3; ++i) run_suite(o, fmt::format("jet#{}", i), build_jet(draw_jet(rng)), g);
  for (int i = 0; i < 3; ++i) run_suite(o, fmt::format("knot#{}", i), build_torus_knot(draw_torus_knot(rng)), g);
  return o;
}

Outcome c3() {
  Outcome o;
  std::mt19937_64 rng(31);
  std::vector<Solution> all{build_static(), build_torus_knot(sol13_params()), build_torus_knot(sol14_params()),
                            build_field_aligned({f3("mu + 0.3*sin(xi2)"), f3("xi2"), f3("xi3 + 0.2*sin(mu)")}),
                            build_dim3({f3("xi2*cos(mu) - xi3*sin(mu)"), f3("xi2*sin(mu) + xi3*cos(mu)"), f1("mu"),
                                        f1("0.2*sin(s)", "s"), f1("0.1*s", "s")})};
  for (int i = 0; i < 2; ++i) all.push_back(build_jet(draw_jet(rng)));
  for (int i = 0; i < 2; ++i) all.push_back(build_torus_knot(draw_torus_knot(rng)));
  CheckOptions opt;
  opt.tolerance = kWaveTol;
  double worst = 0.0;
  bool ok = true;
  for (const auto& s : all) {
    const auto r = wave_relation(s, paper_grid(), opt);
    worst = std::max(worst, r.max_norm());
    ok = ok && r.passed;
  }
  o.require(ok, fmt::format("{} solutions, max |gamma_tt - gamma_11| {:.2e}", all.size(), worst));
  return o;
}

Outcome c4() {
  Outcome o;
  auto t = [](const char* s) { return ScalarFn1::parse(s, {"t"}); };
  const std::vector<Transform> all{
      TimeShift{0.4},
      Rotation{Vec3(1, 2, -1), 0.7},
      Dilation1{0.2},
      Dilation2{0.1},
      GeneralizedGalilean{{t("t^2"), t("sin(t)"), t("0")}},
      PressureShift{t("3 + t^3")},
      Reparametrization{f2("0.3*sin(xi3)"), f2("xi2 + 0.2*xi3^2"), f2("xi3"), std::nullopt},
      CauchyEquivalence{f2("xi2 + 0.1*sin(xi3)"), f2("xi3 + 0.05*xi3^2"), std::nullopt}};
  for (const auto& tr : all) {
    const Solution out = mhdnat::apply(tr, sol13());
    bool ok = false;
    const double m = suite_max(out, interior_grid(out.domain, 9), kExactTol, &ok);
    o.require(ok, fmt::format("{} {:.1e}", name_of(tr), m));
  }
  const double eps = 0.1;
  const Solution d = mhdnat::apply(Dilation2{eps}, sol13());
  auto max_P = [](const Solution& s) {
    const GridSpec g = interior_grid(s.domain, 9);
    double m = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) m = std::max(m, std::abs(eulerian_fields(s, g.point(i)).P));
    return m;
  };
  const double ratio = max_P(d) / max_P(sol13());
  o.require(std::abs(ratio - std::exp(4 * eps)) <= kDilationTol,
            fmt::format("dilation2 max|P| ratio - e^(4 eps) = {:.1e}", ratio - std::exp(4 * eps)));
  return o;
}

Outcome c5() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const int expected[] = {0, 1, 1, 1, 2, 2, 2, 2};
  for (int row = 1; row <= 8; ++row) {
    Table1Row r = make_row(default_template(row));
    r.box.count = kRowSamples;
    ClassifyOptions opt;
    opt.tolerance = kRowTol;
    opt.negative_threshold = kNegativeMin;
    const RowReport rep = verify_table_row(r, 3, 1000 + static_cast<std::uint64_t>(row), opt);
    std::string neg = "none";
    if (rep.negative_min) neg = fmt::format("{:.1e}", *rep.negative_min);
    const bool neg_ok = rep.negative_min ? *rep.negative_min >= kNegativeMin : row == 1;
    o.require(rep.passed && rep.worst_residual <= kRowTol && neg_ok && rep.operator_identity &&
                  rep.rank == expected[row - 1] && rep.rank == r.expected_rank,
              fmt::format("row {} res {:.1e} neg {} rank {} ({})", row, rep.worst_residual, neg, rep.rank,
                          rank_case(rep.rank)));
  }
  // Coefficient identity over random rational constants.
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> num(-50, 50), den(1, 12);
  bool identity = true;
  for (int i = 0; i < 1000; ++i) {
    const CVecExact c{Rational(num(rng), den(rng)), Rational(num(rng), den(rng)), Rational(num(rng), den(rng))};
    identity = identity && operator_identity_holds(c) &&
               operator_Y(c) == operator_Y1() * c[0] + operator_Y2() * c[1] + operator_Y3() * c[2];
  }
  o.require(identity, "Y(c) = c1 Y1 + c2 Y2 + c3 Y3 exact for 1000 rational c");
  const double dt = seconds_since(t0);
  o.require(dt <= kClassifySeconds, fmt::format("{:.2f} s", dt));
  return o;
}

Box3 cube(double r) { return {Interval{-r, r}, Interval{-r, r}, Interval{-r, r}}; }

Outcome c6() {
  Outcome o;
  const auto circ = EulerianInitialData::parse({"-y", "x", "0"}, "1", {"0", "0", "0"}, cube(3));
  const Grid3 g{AxisSpec{0.0, 2 * kPi, 129}, AxisSpec{-0.5, 0.5, 5}, AxisSpec{0.5, 1.5, 5}};
  const InitialMap m = build_initial_map(circ, SeedSurface::parse({"xi3", "0", "xi2"}), g);
  o.require(m.f_variation <= kInitialMapTol, fmt::format("circular f variation {:.1e}", m.f_variation));

  const EulerianInitialData knot = eulerian_from_solution(sol13(), 0.0, cube(2.5));
  SeedSurface seed;
  seed.s = [](double xi2, double xi3) { return vec(sol13().gamma(Point4{0.0, 0.0, xi2, xi3})); };
  seed.transversality = 1e-3;
  IntegratorConfig cfg;
  cfg.abs_tol = cfg.rel_tol = 1e-11;
  const Grid3 gk{AxisSpec{0.0, 0.2, 17}, AxisSpec{0.5, 0.6, 5}, AxisSpec{0.9, 1.0, 5}};
  const InitialMap mk = build_initial_map(knot, seed, gk, cfg);
  const auto rep = incompressibility_check(mk, knot.rho0, [](double, double xi3) { return xi3; }, kInitialMapTol);
  o.require(rep.passed, fmt::format("sol13 t=0 |rho0 det - xi3| {:.1e}", rep.equation("incompressibility").max_norm));

  const auto div = EulerianInitialData::parse({"x", "0", "0"}, "1", {"0", "0", "0"}, cube(10));
  const Grid3 gd{AxisSpec{0.0, 1.0, 17}, AxisSpec{-0.5, 0.5, 5}, AxisSpec{-0.5, 0.5, 5}};
  const InitialMap md = build_initial_map(div, SeedSurface::parse({"1", "xi2", "xi3"}), gd);
  const auto neg = incompressibility_check(md, div.rho0, [](double, double) { return 1.0; }, kInitialMapTol);
  o.require(md.f_variation > kInitialMapTol && !neg.passed,
            fmt::format("divergent control rejected (f variation {:.2f})", md.f_variation));
  return o;
}

ClosedCurve line13(double xi2, double xi3) {
  return [xi2, xi3](double s) { return vec(sol13().gamma(Point4{0.0, 2 * kPi * s, xi2, xi3})); };
}

ClosedCurve circle(const Vec3& c, const Vec3& e1, const Vec3& e2) {
  return [=](double s) { return Vec3(c + std::cos(2 * kPi * s) * e1 + std::sin(2 * kPi * s) * e2); };
}

Outcome c7() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const Polyline line = sample_magnetic_line(sol13(), 0.0, 0.0, 1.0, 0.0, 2 * kPi, 1025, kClosureGap);
  o.require(line.closed && line.gap <= kClosureGap, fmt::format("(0,1) closure gap {:.1e}", line.gap));
  try {
    const LinkResult lk = linking_number(line13(0.0, 1.0), line13(kPi, 1.0));
    o.require(lk.value == 6 && std::abs(lk.raw - 6.0) <= kLinkDeviation,
              fmt::format("lk((0,1),(pi,1)) = {} raw {:.4f}", lk.value, lk.raw));
  } catch (const GeometryError& e) {
    o.require(false, fmt::format("lk((0,1),(pi,1)): {}", e.what()));
  }
  const LinkResult nested = linking_number(line13(0.0, 1.0), line13(0.0, 0.5));
  o.note(fmt::format("lk((0,1),(0,0.5)) = {} raw {:.4f}", nested.value, nested.raw));
  const LinkResult hopf = linking_number(circle(Vec3::Zero(), Vec3::UnitX(), Vec3::UnitY()),
                                         circle(Vec3(1, 0, 0), Vec3::UnitX(), Vec3::UnitZ()));
  o.require(std::abs(hopf.value) == 1 && std::abs(std::abs(hopf.raw) - 1.0) <= kLinkDeviation,
            fmt::format("Hopf {} raw {:.4f}", hopf.value, hopf.raw));
  const LinkResult apart = linking_number(circle(Vec3::Zero(), Vec3::UnitX(), Vec3::UnitY()),
                                          circle(Vec3(5, 0, 0), Vec3::UnitX(), Vec3::UnitZ()));
  o.require(apart.value == 0 && std::abs(apart.raw) <= kLinkDeviation,
            fmt::format("unlinked {} raw {:.1e}", apart.value, apart.raw));
  const double dt = seconds_since(t0);
  o.require(dt <= kTopologySeconds, fmt::format("{:.1f} s", dt));
  return o;
}

Outcome c8() {
  Outcome o;
  const CellAxis full{0.0, 2 * kPi, 128};
  struct Case {
    const char* label;
    TorusKnotParams params;
    int poloidal;  // core winding about the tube axis: 0 for the torus, 3 for the trefoil
  };
  for (const Case& c : {Case{"sol13", sol13_params(), 0}, Case{"sol14", sol14_params(), 3}}) {
    const SurfaceMesh m = sample_surface(build_torus_knot(c.params), 0.0, FixAxis::xi3, 1.0, full, full);
    const MeshCheck mc = check_mesh(m);
    const TorusWinding w = torus_winding(core_curve(m));
    o.require(mc.watertight && mc.finite && mc.indices_valid && mc.nonmanifold_edges == 0,
              fmt::format("{} {} quads watertight, finite", c.label, m.quads.size()));
    o.require(mc.euler == 0 && mc.consistently_oriented && std::abs(w.toroidal) == 2 &&
                  std::abs(w.poloidal) == c.poloidal,
              fmt::format("{} genus-1 tube, core winding ({}, {})", c.label, w.toroidal, w.poloidal));
  }
  return o;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome c9() {
  namespace fs = std::filesystem;
  Outcome o;
  const fs::path dir = fs::temp_directory_path() / fmt::format("mhdnat_acceptance_{}", ::getpid());
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string cli = MHDNAT_CLI_PATH, cfg = std::string(MHDNAT_SOURCE_DIR) + "/configs/";
  const std::vector<std::pair<std::string, std::string>> runs{
      {"verify_{}.json", "verify " + cfg + "sol14.json --report {}"},
      {"classify_{}.json", "classify --row 5 --seed 11 --out {}"},
      {"mesh_{}.obj", "mesh " + cfg + "sol13.json --out {}"},
      {"mesh_{}.vtk", "mesh " + cfg + "sol14.json --out {}"},
      {"trace_{}.csv", "trace " + cfg + "circular.json --start 1,0,0 --out {}"}};
  for (const auto& [pattern, args] : runs) {
    std::string files[2];
    for (int k = 0; k < 2; ++k) {
      const fs::path out = dir / fmt::format(fmt::runtime(pattern), k);
      const std::string cmd =
          fmt::format("\"{}\" {} >/dev/null 2>&1", cli, fmt::format(fmt::runtime(args), out.string()));
      const int rc = std::system(cmd.c_str());
      o.require(rc == 0 && fs::exists(out), fmt::format("{} run {}", out.filename().string(), k));
      files[k] = slurp(out);
    }
    o.require(!files[0].empty() && files[0] == files[1],
              fmt::format("{} identical (sha256 {:.12})", fmt::format(fmt::runtime(pattern), "*"),
                          sha256_hex(files[0])));
  }
  fs::remove_all(dir);
  return o;
}

struct Criterion {
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {"exactness of the two knotted instances", c1},
      {"family exactness under random parameters", c2},
      {"constant total pressure wave relation", c3},
      {"symmetry closure", c4},
      {"state-equation classification", c5},
      {"initial-condition construction", c6},
      {"magnetic-line topology", c7},
      {"surface mesh artifacts", c8},
      {"CLI determinism", c9}};
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--only" && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: acceptance [--only N]\n");
      return 2;
    }
  }
  if (only < 0 || only > static_cast<int>(all.size())) {
    std::fprintf(stderr, "criterion %d does not exist\n", only);
    return 2;
  }
  bool passed = true;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (only && static_cast<int>(i) + 1 != only) continue;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      o = all[i].run();
    } catch (const std::exception& e) {
      o.passed = false;
      o.detail = fmt::format("exception: {}", e.what());
    }
    std::printf("C%zu %s %s [%.1f s]: %s\n", i + 1, o.passed ? "PASS" : "FAIL", all[i].name, seconds_since(t0),
                o.detail.c_str());
    std::fflush(stdout);
    passed = passed && o.passed;
  }
  return passed ? 0 : 1;
}
