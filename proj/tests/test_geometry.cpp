#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include <gtest/gtest.h>

#include "mhdnat/export.hpp"
#include "mhdnat/families.hpp"
#include "mhdnat/geometry.hpp"

using namespace mhdnat;

namespace {

constexpr double kPi = std::numbers::pi;

const Solution& sol13() {
  static const Solution s = build_torus_knot(sol13_params());
  return s;
}
const Solution& sol14() {
  static const Solution s = build_torus_knot(sol14_params());
  return s;
}

Polyline circle(const Vec3& center, const Vec3& e1, const Vec3& e2, int n = 400) {
  Polyline c;
  for (int i = 0; i <= n; ++i) {
    const double s = 2 * kPi * i / n;
    c.points.push_back(center + std::cos(s) * e1 + std::sin(s) * e2);
    c.params.push_back(s);
  }
  c.closed = true;
  return c;
}

ClosedCurve magnetic_line(const Solution& sol, double xi2, double xi3) {
  return [&sol, xi2, xi3](double s) { return vec(sol.gamma(Point4{0.0, 2 * kPi * s, xi2, xi3})); };
}

const CellAxis kFull{0.0, 2 * kPi, 64};

}  // namespace

TEST(Linking, HopfLinkAndUnlinkedCircles) {
  const Polyline a = circle(Vec3::Zero(), Vec3::UnitX(), Vec3::UnitY());
  const Polyline hopf = circle(Vec3(1, 0, 0), Vec3::UnitX(), Vec3::UnitZ());
  const Polyline far = circle(Vec3(5, 0, 0), Vec3::UnitX(), Vec3::UnitZ());
  const LinkResult h = linking_number(a, hopf);
  EXPECT_EQ(std::abs(h.value), 1);
  EXPECT_NEAR(std::abs(h.raw), 1.0, 1e-2);
  EXPECT_EQ(linking_number(a, far).value, 0);
  EXPECT_NEAR(linking_number(a, far).raw, 0.0, 1e-6);
  // Symmetric, and reversing one curve flips the sign.
  EXPECT_EQ(linking_number(hopf, a).value, h.value);
  Polyline rev = hopf;
  std::reverse(rev.points.begin(), rev.points.end());
  EXPECT_EQ(linking_number(a, rev).value, -h.value);
}

TEST(Linking, ClosedCurveOverloadConverges) {
  const ClosedCurve a = [](double s) { return Vec3(std::cos(2 * kPi * s), std::sin(2 * kPi * s), 0); };
  const ClosedCurve b = [](double s) { return Vec3(1 + std::cos(2 * kPi * s), 0, std::sin(2 * kPi * s)); };
  const LinkResult r = linking_number(a, b);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(std::abs(r.value), 1);
  EXPECT_NEAR(std::abs(r.raw), 1.0, 1e-3);
}

TEST(Linking, RejectsOpenAndIntersectingCurves) {
  const Polyline a = circle(Vec3::Zero(), Vec3::UnitX(), Vec3::UnitY());
  Polyline open = circle(Vec3(1, 0, 0), Vec3::UnitX(), Vec3::UnitZ());
  open.points.pop_back();
  open.points.pop_back();
  EXPECT_THROW(linking_number(a, open), GeometryError);
  EXPECT_THROW(linking_number(a, a), GeometryError);
}

// Nested lines xi3 = 1 and xi3 = 1/2 of the first knotted solution are
// parallel (2, 3) torus curves; their linking number is 2 * 3.
TEST(Linking, NestedKnottedLines) {
  const LinkResult r = linking_number(magnetic_line(sol13(), 0.0, 1.0), magnetic_line(sol13(), 0.0, 0.5));
  EXPECT_EQ(std::abs(r.value), 6);
  EXPECT_NEAR(std::abs(r.raw), 6.0, 1e-2);
}

TEST(MagneticLine, ClosureOverOnePeriod) {
  const Polyline closed = sample_magnetic_line(sol13(), 0.0, 0.0, 1.0, 0.0, 2 * kPi, 257);
  EXPECT_TRUE(closed.closed);
  EXPECT_LE(closed.gap, 1e-9);
  const Polyline open = sample_magnetic_line(sol13(), 0.0, 0.0, 1.0, 0.0, kPi, 129);
  EXPECT_FALSE(open.closed);
  EXPECT_GT(open.gap, 0.1);
}

TEST(MagneticLine, PeriodDetection) {
  EXPECT_NEAR(*minimal_period({3.0, 2.0}), 2 * kPi, 1e-12);
  EXPECT_NEAR(*minimal_period({3.0, 2.5}), 4 * kPi, 1e-12);
  EXPECT_FALSE(minimal_period({1.0, std::sqrt(2.0)}));
  EXPECT_NEAR(*phase_rate(ScalarFn1::parse("3*mu + 1", {"mu"})), 3.0, 1e-12);
  EXPECT_FALSE(phase_rate(ScalarFn1::parse("mu^2", {"mu"})));
}

TEST(Surface, KnottedTorusIsWatertight) {
  const SurfaceMesh m = sample_surface(sol13(), 0.0, FixAxis::xi3, 1.0, kFull, kFull);
  EXPECT_EQ(m.vertices.size(), 4096u);
  EXPECT_EQ(m.quads.size(), 4096u);
  EXPECT_TRUE(m.periodic_u && m.periodic_v);
  const MeshCheck c = check_mesh(m);
  EXPECT_TRUE(c.finite);
  EXPECT_TRUE(c.watertight);
  EXPECT_TRUE(c.consistently_oriented);
  EXPECT_EQ(c.euler, 0);
  EXPECT_GT(c.signed_volume, 0.0);
}

TEST(Surface, CoreCurveWindings) {
  const SurfaceMesh m13 = sample_surface(sol13(), 0.0, FixAxis::xi3, 1.0, kFull, kFull);
  const SurfaceMesh m14 = sample_surface(sol14(), 0.0, FixAxis::xi3, 1.0, kFull, kFull);
  EXPECT_TRUE(check_mesh(m14).watertight);
  const TorusWinding w13 = torus_winding(core_curve(m13));
  const TorusWinding w14 = torus_winding(core_curve(m14));
  EXPECT_EQ(std::abs(w13.toroidal), 2);
  EXPECT_EQ(w13.poloidal, 0);  // unknotted core: the surface is a torus
  EXPECT_EQ(std::abs(w14.toroidal), 2);
  EXPECT_EQ(std::abs(w14.poloidal), 3);  // trefoil core
}

TEST(Surface, OpenPatchAndObjText) {
  const CellAxis u{0.0, 1.0, 2}, v{0.0, 1.0, 2};
  const SurfaceMesh m = sample_surface(sol13(), 0.0, FixAxis::xi3, 1.0, u, v);
  EXPECT_EQ(m.vertices.size(), 9u);
  EXPECT_EQ(m.quads.size(), 4u);
  const MeshCheck c = check_mesh(m);
  EXPECT_FALSE(c.watertight);
  EXPECT_EQ(c.boundary_edges, 8u);
  EXPECT_EQ(c.euler, 1);
  const std::string obj = to_obj(m);
  EXPECT_EQ(std::count(obj.begin(), obj.end(), '\n'), 1 + 9 + 4);
  EXPECT_NE(obj.find("\nf 1 4 5 2\n"), std::string::npos) << obj;
  const ObjData d = parse_obj(obj);
  ASSERT_EQ(d.vertices.size(), 9u);
  EXPECT_NEAR((d.vertices[4] - m.vertices[4]).norm(), 0.0, 1e-8);
  EXPECT_EQ(d.faces[0], (std::vector<int>{0, 3, 4, 1}));
}

TEST(Export, ObjRoundTripAndFormats) {
  const SurfaceMesh m = sample_surface(sol14(), 0.0, FixAxis::xi3, 1.0, {0, 2 * kPi, 16}, {0, 2 * kPi, 8});
  const ObjData d = parse_obj(to_obj(m));
  ASSERT_EQ(d.vertices.size(), m.vertices.size());
  ASSERT_EQ(d.faces.size(), m.quads.size());
  for (std::size_t i = 0; i < d.vertices.size(); ++i)
    EXPECT_NEAR((d.vertices[i] - m.vertices[i]).norm(), 0.0, 1e-8 * (1 + m.vertices[i].norm()));
  const std::string vtk = to_vtk(m);
  EXPECT_EQ(vtk.rfind("# vtk DataFile Version 3.0\n", 0), 0u);
  EXPECT_NE(vtk.find("SCALARS B double 1"), std::string::npos);
  EXPECT_NE(vtk.find("POLYGONS 128 640"), std::string::npos);
  EXPECT_THROW(render(m, ExportFormat::csv), ExportError);
  EXPECT_THROW(parse_format("stl"), ExportError);

  const Polyline line = sample_magnetic_line(sol13(), 0.0, 0.0, 1.0, 0.0, 2 * kPi, 5);
  const std::string csv = to_csv(line);
  EXPECT_EQ(csv.rfind("s,x,y,z\n0,0,1.73205081,0\n", 0), 0u) << csv;
  EXPECT_EQ(parse_obj(to_obj(line)).lines.at(0).size(), 5u);
  Polyline bad = line;
  bad.points[0][0] = std::nan("");
  EXPECT_THROW(to_csv(bad), ExportError);
}

TEST(Export, AtomicWritesAndManifest) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "mhdnat_export_test";
  fs::remove_all(dir);
  write_atomic(dir / "a.txt", "abc");
  write_atomic(dir / "a.txt", "abc");
  std::ifstream in(dir / "a.txt");
  std::string s;
  std::getline(in, s);
  EXPECT_EQ(s, "abc");
  // Known digest of "abc".
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  const auto m = manifest(dir, {"a.txt"});
  EXPECT_EQ(m["files"][0]["path"], "a.txt");
  EXPECT_EQ(m["files"][0]["bytes"], 3);
  EXPECT_EQ(m["files"][0]["sha256"], sha256_hex("abc"));
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++entries;
  EXPECT_EQ(entries, 1u);  // no temporary files left behind
  fs::remove_all(dir);
}
