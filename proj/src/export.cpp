#include "mhdnat/export.hpp"

#include <fstream>
#include <sstream>
#include <system_error>

#include <fmt/format.h>
#include <openssl/evp.h>
#include <unistd.h>

namespace mhdnat {

ExportFormat parse_format(const std::string& name) {
  if (name == "obj") return ExportFormat::obj;
  if (name == "vtk") return ExportFormat::vtk;
  if (name == "csv") return ExportFormat::csv;
  throw ExportError(fmt::format("unknown export format \"{}\" (obj, vtk, csv)", name));
}

std::string extension_of(ExportFormat f) {
  switch (f) {
    case ExportFormat::obj: return ".obj";
    case ExportFormat::vtk: return ".vtk";
    case ExportFormat::csv: return ".csv";
  }
  return "";
}

namespace {

void append_point(std::string& out, const char* prefix, const Vec3& x) {
  out += fmt::format("{}{:.9g} {:.9g} {:.9g}\n", prefix, x[0], x[1], x[2]);
}

void check_points(const std::vector<Vec3>& pts) {
  for (const auto& x : pts)
    if (!x.allFinite()) throw ExportError("geometry contains non-finite coordinates");
}

}  // namespace

std::string to_obj(const SurfaceMesh& mesh) {
  check_points(mesh.vertices);
  std::string out = "# mhdnat surface\n";
  for (const auto& x : mesh.vertices) append_point(out, "v ", x);
  for (const auto& q : mesh.quads) out += fmt::format("f {} {} {} {}\n", q[0] + 1, q[1] + 1, q[2] + 1, q[3] + 1);
  return out;
}

std::string to_vtk(const SurfaceMesh& mesh) {
  check_points(mesh.vertices);
  std::string out = "# vtk DataFile Version 3.0\nmhdnat surface\nASCII\nDATASET POLYDATA\n";
  out += fmt::format("POINTS {} double\n", mesh.vertices.size());
  for (const auto& x : mesh.vertices) append_point(out, "", x);
  out += fmt::format("POLYGONS {} {}\n", mesh.quads.size(), mesh.quads.size() * 5);
  for (const auto& q : mesh.quads) out += fmt::format("4 {} {} {} {}\n", q[0], q[1], q[2], q[3]);
  out += fmt::format("POINT_DATA {}\n", mesh.vertices.size());
  auto scalars = [&](const char* name, const std::vector<double>& v) {
    if (v.size() != mesh.vertices.size()) return;
    out += fmt::format("SCALARS {} double 1\nLOOKUP_TABLE default\n", name);
    for (double s : v) out += fmt::format("{:.9g}\n", s);
  };
  scalars("B", mesh.B_mag);
  scalars("P", mesh.P);
  scalars("p", mesh.p);
  return out;
}

std::string to_obj(const Polyline& line) {
  check_points(line.points);
  std::string out = "# mhdnat polyline\n";
  for (const auto& x : line.points) append_point(out, "v ", x);
  out += "l";
  for (std::size_t i = 0; i < line.points.size(); ++i) out += fmt::format(" {}", i + 1);
  out += "\n";
  return out;
}

std::string to_vtk(const Polyline& line) {
  check_points(line.points);
  const std::size_t n = line.points.size();
  std::string out = "# vtk DataFile Version 3.0\nmhdnat polyline\nASCII\nDATASET POLYDATA\n";
  out += fmt::format("POINTS {} double\n", n);
  for (const auto& x : line.points) append_point(out, "", x);
  out += fmt::format("LINES 1 {}\n{}", n + 1, n);
  for (std::size_t i = 0; i < n; ++i) out += fmt::format(" {}", i);
  out += fmt::format("\nPOINT_DATA {}\nSCALARS s double 1\nLOOKUP_TABLE default\n", n);
  for (double s : line.params) out += fmt::format("{:.9g}\n", s);
  return out;
}

std::string to_csv(const Polyline& line) {
  check_points(line.points);
  std::string out = "s,x,y,z\n";
  for (std::size_t i = 0; i < line.points.size(); ++i) {
    const Vec3& x = line.points[i];
    out += fmt::format("{:.9g},{:.9g},{:.9g},{:.9g}\n", line.params[i], x[0], x[1], x[2]);
  }
  return out;
}

std::string render(const SurfaceMesh& mesh, ExportFormat f) {
  switch (f) {
    case ExportFormat::obj: return to_obj(mesh);
    case ExportFormat::vtk: return to_vtk(mesh);
    case ExportFormat::csv: break;
  }
  throw ExportError("surface meshes export to obj or vtk only");
}

std::string render(const Polyline& line, ExportFormat f) {
  switch (f) {
    case ExportFormat::obj: return to_obj(line);
    case ExportFormat::vtk: return to_vtk(line);
    case ExportFormat::csv: return to_csv(line);
  }
  return {};
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  std::error_code ec;
  fs::create_directories(dir, ec);
  const fs::path tmp = dir / fmt::format(".{}.tmp.{}", path.filename().string(), ::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ExportError(fmt::format("cannot open {} for writing", tmp.string()));
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw ExportError(fmt::format("write to {} failed", tmp.string()));
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw ExportError(fmt::format("cannot move {} into place: {}", path.string(), ec.message()));
  }
}

std::string sha256_hex(const std::string& content) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(content.data(), content.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw ExportError("sha256 failed");
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ExportError(fmt::format("cannot read {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return sha256_hex(ss.str());
}

nlohmann::json manifest(const std::filesystem::path& root, const std::vector<std::filesystem::path>& files) {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& f : files) {
    const auto full = f.is_absolute() ? f : root / f;
    list.push_back({{"path", std::filesystem::relative(full, root).generic_string()},
                    {"bytes", std::filesystem::file_size(full)},
                    {"sha256", sha256_file(full)}});
  }
  return {{"files", list}};
}

ObjData parse_obj(const std::string& text) {
  ObjData d;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      double x, y, z;
      if (!(ls >> x >> y >> z)) throw ExportError(fmt::format("OBJ line {}: malformed vertex", lineno));
      d.vertices.emplace_back(x, y, z);
    } else if (tag == "f" || tag == "l") {
      std::vector<int> idx;
      std::string tok;
      while (ls >> tok) {
        const int k = std::stoi(tok.substr(0, tok.find('/')));
        if (k < 1 || k > static_cast<int>(d.vertices.size()))
          throw ExportError(fmt::format("OBJ line {}: index {} out of range", lineno, k));
        idx.push_back(k - 1);
      }
      (tag == "f" ? d.faces : d.lines).push_back(std::move(idx));
    }
  }
  return d;
}

}  // namespace mhdnat
