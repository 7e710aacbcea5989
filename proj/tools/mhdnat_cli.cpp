#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "mhdnat/classification.hpp"
#include "mhdnat/export.hpp"
#include "mhdnat/fieldline.hpp"
#include "mhdnat/geometry.hpp"
#include "mhdnat/io/config.hpp"
#include "mhdnat/solution.hpp"

using nlohmann::json;
using namespace mhdnat;

namespace {

constexpr int kOk = 0, kCheckFailed = 1, kConfigError = 2, kIoError = 3;

// Splits on commas (or `sep`) outside parentheses.
std::vector<std::string> split_top(const std::string& s, char sep = ',') {
  std::vector<std::string> out(1);
  int depth = 0;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == sep && depth == 0)
      out.emplace_back();
    else
      out.back() += c;
  }
  for (auto& p : out) {
    const auto b = p.find_first_not_of(" \t");
    const auto e = p.find_last_not_of(" \t");
    p = b == std::string::npos ? "" : p.substr(b, e - b + 1);
  }
  return out;
}

std::vector<double> numbers(const std::string& s, std::size_t count, const std::string& flag) {
  const auto parts = split_top(s);
  if (parts.size() != count) throw ConfigError(flag, fmt::format("expected {} comma-separated values", count));
  std::vector<double> v;
  for (std::size_t i = 0; i < parts.size(); ++i) v.push_back(config_number(json(parts[i]), flag));
  return v;
}

void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::fwrite(content.data(), 1, content.size(), stdout);
    return;
  }
  write_atomic(path, content);
}

// Writes artifacts and a manifest listing them (default: <first artifact>.manifest.json).
void write_with_manifest(const std::vector<std::pair<std::filesystem::path, std::string>>& files,
                         const std::string& manifest_name = "") {
  std::vector<std::filesystem::path> paths;
  for (const auto& [p, content] : files) {
    write_atomic(p, content);
    paths.push_back(std::filesystem::absolute(p));
  }
  const auto root = paths.front().parent_path();
  auto m = manifest(root, paths);
  const std::string name =
      manifest_name.empty() ? files.front().first.filename().string() + ".manifest.json" : manifest_name;
  write_atomic(root / name, m.dump(2) + "\n");
}

RunConfig load(const std::string& path) { return load_config_file(path); }

const Solution& need_solution(const RunConfig& rc) {
  if (!rc.solution) throw ConfigError("family", "this command needs a solution family");
  return *rc.solution;
}

struct VerifyArgs {
  std::string config;
  std::optional<double> tolerance;
  std::vector<std::string> checks;
  std::optional<int> grid_n;
  std::string exec;
  std::string report;
  std::optional<double> perturb;
};

json run_checks(const RunConfig& rc, const VerifyArgs& a, bool& passed) {
  VerifyConfig v = rc.verify;
  if (!a.checks.empty()) v.checks = a.checks;
  const json& src = rc.source;
  const bool explicit_tol = src.contains("verify") && src["verify"].contains("tolerance");
  if (a.tolerance)
    v.tolerance = *a.tolerance;
  else if (!explicit_tol && rc.solution && rc.solution->diff.mode == DerivativeMode::finite_difference)
    v.tolerance = 1e-4;
  if (a.grid_n)
    for (auto& ax : v.grid.axes) ax.n = *a.grid_n;
  if (a.exec == "serial") v.exec = Execution::serial;
  if (a.exec == "parallel") v.exec = Execution::parallel;

  json out;
  out["command"] = "verify";
  out["family"] = rc.family;
  out["steps"] = rc.steps;
  out["tolerance"] = v.tolerance;
  json reports = json::array();
  passed = true;

  if (!rc.solution) {
    if (!rc.eulerian || !rc.eulerian->seed)
      throw ConfigError("eulerian.seed_surface", "verify of Eulerian data needs a seed surface");
    const auto& e = *rc.eulerian;
    const InitialMap map = build_initial_map(e.data, *e.seed, e.grid, rc.trace.integrator, v.exec);
    ResidualReport r;
    r.check = "initial_map";
    r.tolerance = v.tolerance;
    r.points = map.size();
    r.equations.push_back({"variation_xi1", map.f_variation, map.f_variation, {}});
    r.notes = map.notes;
    r.passed = map.f_variation <= v.tolerance && !map.fold_over;
    passed = passed && r.passed;
    reports.push_back(r.to_json());
    out["checks"] = reports;
    out["passed"] = passed;
    return out;
  }

  const Solution& sol = *rc.solution;
  try {
    v.grid.validate(sol.domain);
  } catch (const std::exception& e) {
    throw ConfigError("verify.grid", e.what());
  }
  CheckOptions opt;
  opt.tolerance = v.tolerance;
  opt.exec = v.exec;
  for (const auto& c : v.checks) {
    ResidualReport r;
    if (c == "incompressible") {
      if (sol.compressible()) continue;
      r = residual_incompressible(sol, v.grid, opt);
    } else if (c == "compressible") {
      if (!sol.compressible() || !sol.h) throw ConfigError("verify.checks", "compressible check needs params.p and params.h");
      r = residual_compressible(sol, *sol.h, v.grid, opt);
    } else if (c == "eulerian") {
      r = eulerian_residual(sol, v.grid, opt);
    } else if (c == "cauchy") {
      r = cauchy_check(sol, v.grid, opt);
    } else if (c == "wave") {
      r = wave_relation(sol, v.grid, opt);
    } else {
      throw ConfigError("verify.checks", fmt::format("unknown check \"{}\"", c));
    }
    passed = passed && r.passed;
    reports.push_back(r.to_json());
  }
  out["checks"] = reports;
  out["passed"] = passed;
  return out;
}

int cmd_verify(const VerifyArgs& a) {
  json doc;
  RunConfig rc;
  if (a.perturb) {
    // Reload with an injected perturbation of gamma^1.
    rc = load(a.config);
    doc = rc.source;
    doc["perturb"] = {{"component", 0}, {"delta", "sin(xi1 + t) * xi3"}, {"amplitude", *a.perturb}};
    rc = load_config(doc);
  } else {
    rc = load(a.config);
  }
  bool passed = false;
  const json report = run_checks(rc, a, passed);
  for (const auto& r : report["checks"])
    std::fprintf(stderr, "%-15s max %.3e  tol %.1e  %s\n", r["check"].get<std::string>().c_str(),
                 r["max"].get<double>(), r["tolerance"].get<double>(), r["passed"].get<bool>() ? "pass" : "FAIL");
  const std::string path = !a.report.empty() ? a.report : rc.report;
  emit(path.empty() ? "-" : path, report.dump(2) + "\n");
  return passed ? kOk : kCheckFailed;
}

struct GenerateArgs {
  std::string config;
  std::string out = "generated";
  int n = 9;
};

int cmd_generate(const GenerateArgs& a) {
  const RunConfig rc = load(a.config);
  namespace fs = std::filesystem;
  std::vector<std::pair<fs::path, std::string>> files;
  const fs::path dir = a.out;
  if (rc.solution) {
    const Solution& sol = *rc.solution;
    std::array<Interval, 4> r = sol.domain.axes;
    for (auto& iv : r)
      if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi)) iv = {0.0, 1.0};
    const GridSpec grid = GridSpec::uniform(r, a.n);
    const auto res = sweep(grid, 12, [&](const Point4& at, double* out) {
      const EulerianState s = eulerian_fields(sol, at);
      const double v[12] = {s.x[0], s.x[1], s.x[2], s.u[0], s.u[1], s.u[2], s.B[0], s.B[1], s.B[2], s.rho, s.p, s.P};
      std::copy(v, v + 12, out);
      return true;
    }, rc.verify.exec);
    std::string csv = "t,xi1,xi2,xi3,x,y,z,u1,u2,u3,B1,B2,B3,rho,p,P\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const Point4 at = grid.point(i);
      csv += fmt::format("{:.9g},{:.9g},{:.9g},{:.9g}", at.t, at.xi1, at.xi2, at.xi3);
      for (int k = 0; k < 12; ++k) csv += fmt::format(",{:.9g}", res.values[i * res.width + k]);
      csv += "\n";
    }
    files.emplace_back(dir / "solution_grid.csv", csv);
  }
  if (rc.eulerian && rc.eulerian->seed) {
    const auto& e = *rc.eulerian;
    const InitialMap map = build_initial_map(e.data, *e.seed, e.grid, rc.trace.integrator, rc.verify.exec);
    files.emplace_back(dir / "initial_map.txt", format_initial_map(map));
  }
  if (files.empty()) throw ConfigError("family", "nothing to generate");
  files.emplace_back(dir / "config.json", rc.source.dump(2) + "\n");
  write_with_manifest(files, "manifest.json");
  for (const auto& f : files) std::printf("%s\n", f.first.string().c_str());
  return kOk;
}

struct MeshArgs {
  std::string config;
  std::string fix;
  std::optional<double> t0;
  std::optional<int> cells;
  std::string format;
  std::string out;
};

int cmd_mesh(const MeshArgs& a) {
  const RunConfig rc = load(a.config);
  const Solution& sol = need_solution(rc);
  MeshConfig m = rc.mesh;
  if (!a.fix.empty()) {
    const auto eq = a.fix.find('=');
    const std::string axis = a.fix.substr(0, eq);
    if (axis == "xi2")
      m.fix = FixAxis::xi2;
    else if (axis == "xi3")
      m.fix = FixAxis::xi3;
    else
      throw ConfigError("--fix", "expected xi2=<value> or xi3=<value>");
    if (eq == std::string::npos) throw ConfigError("--fix", "expected xi2=<value> or xi3=<value>");
    m.value = config_number(json(a.fix.substr(eq + 1)), "--fix");
  }
  if (a.t0) m.t0 = *a.t0;
  if (a.cells) {
    if (*a.cells < 1) throw ConfigError("--cells", "must be positive");
    m.u.cells = m.v.cells = *a.cells;
  }
  std::string format = a.format.empty() ? m.format : a.format;
  if (a.format.empty() && !a.out.empty()) {
    const auto ext = std::filesystem::path(a.out).extension().string();
    if (ext == ".vtk") format = "vtk";
    if (ext == ".obj") format = "obj";
  }
  ExportFormat fmt_id;
  try {
    fmt_id = parse_format(format);
    if (fmt_id == ExportFormat::csv) throw ExportError("surface meshes export to obj or vtk only");
  } catch (const ExportError& e) {
    throw ConfigError("mesh.format", e.what());
  }
  SurfaceOptions so;
  so.exec = rc.verify.exec;
  const SurfaceMesh mesh = sample_surface(sol, m.t0, m.fix, m.value, m.u, m.v, so);
  const MeshCheck chk = check_mesh(mesh);
  const std::string content = render(mesh, fmt_id);
  const std::string out = a.out.empty() ? "surface" + extension_of(fmt_id) : a.out;
  write_with_manifest({{out, content}});
  const TorusWinding w = torus_winding(core_curve(mesh));
  json r = {{"command", "mesh"},
            {"family", rc.family},
            {"output", out},
            {"vertices", mesh.vertices.size()},
            {"quads", mesh.quads.size()},
            {"finite", chk.finite},
            {"watertight", chk.watertight},
            {"consistently_oriented", chk.consistently_oriented},
            {"boundary_edges", chk.boundary_edges},
            {"euler_characteristic", chk.euler},
            {"core_winding", {w.toroidal, w.poloidal}}};
  std::printf("%s\n", r.dump(2).c_str());
  return chk.finite && chk.indices_valid && chk.watertight ? kOk : kCheckFailed;
}

struct TraceArgs {
  std::string config;
  std::string start;
  std::string range;
  std::optional<int> n;
  std::optional<double> xi2, xi3;
  std::string format = "csv";
  std::string out;
  double closure_tol = 1e-8;
};

int cmd_trace(const TraceArgs& a) {
  const RunConfig rc = load(a.config);
  ExportFormat fmt_id;
  try {
    fmt_id = parse_format(a.format);
  } catch (const ExportError& e) {
    throw ConfigError("--format", e.what());
  }
  Polyline line;
  if (rc.eulerian || !a.start.empty()) {
    TraceConfig t = rc.trace;
    if (!a.start.empty()) {
      const auto v = numbers(a.start, 3, "--start");
      t.start = Vec3(v[0], v[1], v[2]);
    }
    if (!a.range.empty()) {
      const auto v = numbers(a.range, 2, "--range");
      t.lo = v[0], t.hi = v[1];
    }
    if (a.n) t.n = *a.n;
    if (t.n < 2) throw ConfigError("--n", "need at least 2 samples");
    EulerianInitialData data;
    if (rc.eulerian) {
      data = rc.eulerian->data;
    } else {
      const Solution& sol = need_solution(rc);
      // Bounding box of the sampled magnetic surfaces, padded.
      Box3 box{Interval{1e300, -1e300}, Interval{1e300, -1e300}, Interval{1e300, -1e300}};
      const auto& d = sol.domain.axes;
      for (int i = 0; i <= 16; ++i)
        for (int j = 0; j <= 16; ++j)
          for (int k = 0; k <= 16; ++k) {
            const Point4 p{rc.line.t0, d[1].lo + (d[1].hi - d[1].lo) * i / 16, d[2].lo + (d[2].hi - d[2].lo) * j / 16,
                           d[3].lo + (d[3].hi - d[3].lo) * k / 16};
            const Vec3 x = eulerian_fields(sol, p).x;
            for (int c = 0; c < 3; ++c) box[c] = {std::min(box[c].lo, x[c]), std::max(box[c].hi, x[c])};
          }
      for (auto& iv : box) {
        const double pad = 0.1 * (iv.hi - iv.lo) + 1e-3;
        iv = {iv.lo - pad, iv.hi + pad};
      }
      data = eulerian_from_solution(sol, rc.line.t0, box);
    }
    line = trace_line(data, t.start, t.lo, t.hi, t.n, t.integrator);
    line.closed = !line.truncated && line.gap <= a.closure_tol;
  } else {
    const Solution& sol = need_solution(rc);
    LineConfig l = rc.line;
    if (a.xi2) l.xi2 = *a.xi2;
    if (a.xi3) l.xi3 = *a.xi3;
    if (!a.range.empty()) {
      const auto v = numbers(a.range, 2, "--range");
      l.lo = v[0], l.hi = v[1];
    }
    if (a.n) l.n = *a.n;
    line = sample_magnetic_line(sol, l.t0, l.xi2, l.xi3, l.lo, l.hi, l.n, l.closure_tol);
  }
  const std::string content = render(line, fmt_id);
  if (a.out.empty() || a.out == "-")
    emit("-", content);
  else
    write_with_manifest({{a.out, content}});
  std::fprintf(stderr, "points %zu  gap %.3e  %s%s\n", line.size(), line.gap, line.closed ? "closed" : "open",
               line.truncated ? "  truncated" : "");
  return kOk;
}

struct ClassifyArgs {
  int row = 0;
  std::string k;
  std::string f;
  std::string h;
  std::uint64_t seed = 0;
  int trials = 3;
  int samples = 1000;
  double tolerance = 1e-10;
  double negative_threshold = 1e-2;
  std::string out;
};

Rational parse_rational(const std::string& s) {
  const auto slash = s.find('/');
  try {
    std::size_t used = 0;
    const long long num = std::stoll(s.substr(0, slash), &used);
    if (used != s.substr(0, slash).size()) throw std::invalid_argument(s);
    long long den = 1;
    if (slash != std::string::npos) {
      den = std::stoll(s.substr(slash + 1), &used);
      if (used != s.size() - slash - 1 || den == 0) throw std::invalid_argument(s);
    }
    return Rational(num, den);
  } catch (const std::logic_error&) {
    throw ConfigError("--k", fmt::format("expected an integer or a ratio a/b, got \"{}\"", s));
  }
}

int cmd_classify(const ClassifyArgs& a) {
  if (a.row < 1 || a.row > 9) throw ConfigError("--row", fmt::format("row {} is outside 1..9", a.row));
  if (a.trials < 1) throw ConfigError("--trials", "must be positive");
  if (a.samples < 3) throw ConfigError("--samples", "need at least 3");
  RowTemplate tpl = default_template(a.row);
  if (!a.k.empty()) tpl.k = parse_rational(a.k);
  if (!a.f.empty()) tpl.f = a.f;
  if (!a.h.empty()) tpl.h = a.h;
  Table1Row row;
  try {
    row = make_row(tpl);
  } catch (const std::exception& e) {
    throw ConfigError(a.k.empty() ? "--f" : "--k", e.what());
  }
  row.box.count = a.samples;
  ClassifyOptions opt;
  opt.tolerance = a.tolerance;
  opt.negative_threshold = a.negative_threshold;
  const RowReport r = verify_table_row(row, a.trials, a.seed, opt);
  json j = r.to_json();
  j["command"] = "classify";
  j["seed"] = a.seed;
  emit(a.out.empty() ? "-" : a.out, j.dump(2) + "\n");
  return r.passed ? kOk : kCheckFailed;
}

struct TransformArgs {
  std::string config;
  std::optional<double> time_shift;
  std::string rotation;
  std::optional<double> dilation1, dilation2;
  std::string galilean;
  std::string pressure_shift;
  std::string reparametrize;
  std::string cauchy;
  std::string equivalence;
  std::string out;
};

int cmd_transform(const TransformArgs& a) {
  const RunConfig rc = load(a.config);
  need_solution(rc);
  json doc = rc.source;
  if (!doc.contains("pipeline")) doc["pipeline"] = json::array();
  json& p = doc["pipeline"];
  if (a.time_shift) p.push_back({{"type", "time_shift"}, {"dt", *a.time_shift}});
  if (!a.rotation.empty()) {
    const auto v = numbers(a.rotation, 4, "--rotation");
    p.push_back({{"type", "rotation"}, {"axis", {v[0], v[1], v[2]}}, {"angle", v[3]}});
  }
  if (a.dilation1) p.push_back({{"type", "dilation1"}, {"eps", *a.dilation1}});
  if (a.dilation2) p.push_back({{"type", "dilation2"}, {"eps", *a.dilation2}});
  if (!a.galilean.empty()) {
    const auto parts = split_top(a.galilean);
    if (parts.size() != 3) throw ConfigError("--galilean", "expected three expressions in t");
    p.push_back({{"type", "galilean"}, {"alpha", parts}});
  }
  if (!a.pressure_shift.empty()) p.push_back({{"type", "pressure_shift"}, {"beta", a.pressure_shift}});
  if (!a.reparametrize.empty()) {
    const auto parts = split_top(a.reparametrize, ';');
    if (parts.size() != 3) throw ConfigError("--reparametrize", "expected \"a; eta2; eta3\"");
    p.push_back({{"type", "reparametrization"}, {"a", parts[0]}, {"eta2", parts[1]}, {"eta3", parts[2]}});
  }
  if (!a.cauchy.empty()) {
    const auto parts = split_top(a.cauchy, ';');
    if (parts.size() != 2) throw ConfigError("--cauchy", "expected \"eta2; eta3\"");
    p.push_back({{"type", "cauchy_equivalence"}, {"eta2", parts[0]}, {"eta3", parts[1]}});
  }
  if (!a.equivalence.empty()) {
    const auto v = numbers(a.equivalence, 3, "--equivalence");
    p.push_back({{"type", "equivalence"}, {"alpha", v[0]}, {"beta", v[1]}, {"kappa", v[2]}});
  }
  load_config(doc);  // the transformed configuration must build
  emit(a.out.empty() ? "-" : a.out, doc.dump(2) + "\n");
  return kOk;
}

struct ReportArgs {
  std::vector<std::string> files;
};

// One "key = value" line per scalar of each report; exit 0 iff all passed.
void flatten(const json& j, const std::string& prefix, std::string& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
  } else if (j.is_array() && !j.empty() && (j[0].is_object() || j[0].is_array())) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], fmt::format("{}[{}]", prefix, i), out);
  } else {
    out += fmt::format("{} = {}\n", prefix, j.dump());
  }
}

int cmd_report(const ReportArgs& a) {
  bool passed = true;
  std::string out;
  for (const auto& f : a.files) {
    std::ifstream in(f, std::ios::binary);
    if (!in) throw IoError(fmt::format("cannot read report {}", f));
    json j;
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError(f, fmt::format("not a JSON report: {}", e.what()));
    }
    const json* p = j.is_object() && j.contains("passed") ? &j["passed"] : nullptr;
    if (!p || !p->is_boolean()) throw ConfigError(f, "report has no boolean \"passed\" entry");
    passed = passed && p->get<bool>();
    out += fmt::format("[{}]\n", f);
    flatten(j, "", out);
  }
  std::fputs(out.c_str(), stdout);
  return passed ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  configure_threads();
  CLI::App app{"Exact ideal-MHD flows in natural coordinates: verification, symmetry, classification, geometry"};
  app.require_subcommand(1);

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Check a configured solution against the residual suite");
  verify->add_option("config", va.config, "Config file, or - for stdin")->required();
  verify->add_option("--tolerance", va.tolerance, "Residual tolerance (default: config, 1e-6; 1e-4 with finite differences)");
  verify->add_option("--checks", va.checks, "incompressible, compressible, eulerian, cauchy, wave")->delimiter(',');
  verify->add_option("--grid-n", va.grid_n, "Points per grid axis");
  verify->add_option("--exec", va.exec, "serial or parallel")->check(CLI::IsMember({"serial", "parallel"}));
  verify->add_option("--report", va.report, "Report path (default: config report, else stdout)");
  verify->add_option("--perturb", va.perturb, "Inject amplitude * sin(xi1 + t) xi3 into gamma^1 (negative control)");

  GenerateArgs ga;
  auto* generate = app.add_subcommand("generate", "Tabulate a solution or an initial map with a manifest");
  generate->add_option("config", ga.config, "Config file")->required();
  generate->add_option("--out", ga.out, "Output directory")->capture_default_str();
  generate->add_option("--n", ga.n, "Points per axis of the sampled grid")->capture_default_str();

  MeshArgs ma;
  auto* mesh = app.add_subcommand("mesh", "Export a magnetic surface as OBJ or VTK");
  mesh->add_option("config", ma.config, "Config file")->required();
  mesh->add_option("--fix", ma.fix, "Fixed coordinate, xi2=<v> or xi3=<v>");
  mesh->add_option("--t0", ma.t0, "Time of the surface");
  mesh->add_option("--cells", ma.cells, "Cells along both surface axes");
  mesh->add_option("--format", ma.format, "obj or vtk (default: from --out extension)");
  mesh->add_option("--out", ma.out, "Output file");

  TraceArgs ta;
  auto* trace = app.add_subcommand("trace", "Trace a magnetic line");
  trace->add_option("config", ta.config, "Config file")->required();
  trace->add_option("--start", ta.start, "Starting point x,y,z (integrates the Eulerian field)");
  trace->add_option("--range", ta.range, "Parameter range lo,hi");
  trace->add_option("--n", ta.n, "Number of samples");
  trace->add_option("--xi2", ta.xi2, "Line label xi2 (solution configs without --start)");
  trace->add_option("--xi3", ta.xi3, "Line label xi3 (solution configs without --start)");
  trace->add_option("--format", ta.format, "csv, obj or vtk")->capture_default_str();
  trace->add_option("--closure-tol", ta.closure_tol, "Gap below which a traced line counts as closed")
      ->capture_default_str();
  trace->add_option("--out", ta.out, "Output file (default: stdout)");

  ClassifyArgs ca;
  auto* classify = app.add_subcommand("classify", "Verify one row of the state-equation classification");
  classify->add_option("--row", ca.row, "Row 1..9")->required();
  classify->add_option("--k", ca.k, "Exponent k (integer or a/b)");
  classify->add_option("--f", ca.f, "Free function of z");
  classify->add_option("--state-function", ca.h, "State function h(p, rho) for row 9");
  classify->add_option("--seed", ca.seed, "Sampling seed")->capture_default_str();
  classify->add_option("--trials", ca.trials, "Random constant vectors per check")->capture_default_str();
  classify->add_option("--samples", ca.samples, "Sample points (p, rho)")->capture_default_str();
  classify->add_option("--tolerance", ca.tolerance, "Admitted residual tolerance")->capture_default_str();
  classify->add_option("--negative-threshold", ca.negative_threshold, "Minimum residual of violating constants")
      ->capture_default_str();
  classify->add_option("--out", ca.out, "Report path (default: stdout)");

  TransformArgs xa;
  auto* transform = app.add_subcommand("transform", "Append symmetry transforms to a config and print it");
  transform->add_option("config", xa.config, "Config file, or - for stdin")->required();
  transform->add_option("--time-shift", xa.time_shift, "dt");
  transform->add_option("--rotation", xa.rotation, "ax,ay,az,angle");
  transform->add_option("--dilation1", xa.dilation1, "eps");
  transform->add_option("--dilation2", xa.dilation2, "eps");
  transform->add_option("--galilean", xa.galilean, "alpha1,alpha2,alpha3 as expressions in t");
  transform->add_option("--pressure-shift", xa.pressure_shift, "beta(t)");
  transform->add_option("--reparametrize", xa.reparametrize, "a; eta2; eta3 (expressions in xi2, xi3)");
  transform->add_option("--cauchy", xa.cauchy, "eta2; eta3 (expressions in xi2, xi3)");
  transform->add_option("--equivalence", xa.equivalence, "alpha,beta,kappa (compressible)");
  transform->add_option("--out", xa.out, "Output path (default: stdout)");

  ReportArgs ra;
  auto* report = app.add_subcommand("report", "Print report files as key = value lines; exit 0 iff all passed");
  report->add_option("files", ra.files, "Report files written by verify or classify")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*verify) return cmd_verify(va);
    if (*generate) return cmd_generate(ga);
    if (*mesh) return cmd_mesh(ma);
    if (*trace) return cmd_trace(ta);
    if (*classify) return cmd_classify(ca);
    if (*transform) return cmd_transform(xa);
    if (*report) return cmd_report(ra);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return kIoError;
  } catch (const ExportError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return kIoError;
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return kIoError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kCheckFailed;
  }
  return kConfigError;
}
