#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mhdnat/geometry.hpp"

namespace mhdnat {

class ExportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ExportFormat { obj, vtk, csv };

ExportFormat parse_format(const std::string& name);
std::string extension_of(ExportFormat f);

// All numbers are written with 9 significant digits ("{:.9g}").
std::string to_obj(const SurfaceMesh& mesh);
std::string to_vtk(const SurfaceMesh& mesh);  // legacy ASCII POLYDATA with point scalars B, P, p
std::string to_obj(const Polyline& line);
std::string to_vtk(const Polyline& line);
std::string to_csv(const Polyline& line);     // header "s,x,y,z"

std::string render(const SurfaceMesh& mesh, ExportFormat f);  // csv is rejected for meshes
std::string render(const Polyline& line, ExportFormat f);

// Writes via a temporary file in the same directory and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& content);

std::string sha256_hex(const std::string& content);
std::string sha256_file(const std::filesystem::path& path);

// {"files": [{"path": <relative>, "bytes": n, "sha256": hex}, ...]} in the given order.
nlohmann::json manifest(const std::filesystem::path& root, const std::vector<std::filesystem::path>& files);

struct ObjData {
  std::vector<Vec3> vertices;
  std::vector<std::vector<int>> faces;  // 0-based
  std::vector<std::vector<int>> lines;  // 0-based
};
ObjData parse_obj(const std::string& text);

}  // namespace mhdnat
