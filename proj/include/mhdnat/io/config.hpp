#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mhdnat/fieldline.hpp"
#include "mhdnat/geometry.hpp"
#include "mhdnat/solution.hpp"
#include "mhdnat/symmetry.hpp"

namespace mhdnat {

// Schema violation; `key` is the JSON path of the offending entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message);
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct VerifyConfig {
  GridSpec grid;
  std::vector<std::string> checks{"incompressible", "eulerian", "cauchy"};
  double tolerance = 1e-6;
  Execution exec = Execution::parallel;
};

struct MeshConfig {
  double t0 = 0.0;
  FixAxis fix = FixAxis::xi3;
  double value = 1.0;
  CellAxis u{0.0, 6.283185307179586, 64};
  CellAxis v{0.0, 6.283185307179586, 64};
  std::string format = "obj";
};

struct LineConfig {
  double t0 = 0.0;
  double xi2 = 0.0, xi3 = 1.0;
  double lo = 0.0, hi = 6.283185307179586;
  int n = 513;
  double closure_tol = 1e-9;
};

struct EulerianConfig {
  EulerianInitialData data;
  std::optional<SeedSurface> seed;
  Grid3 grid{};
};

struct TraceConfig {
  Vec3 start = Vec3::Zero();
  double lo = 0.0, hi = 6.283185307179586;
  int n = 257;
  IntegratorConfig integrator;
};

struct RunConfig {
  nlohmann::json source;  // the document as read; transform appends to its pipeline
  std::string family;
  std::optional<Solution> solution;  // absent for pure Eulerian configs
  std::vector<std::string> steps;  // applied pipeline step names, in order
  VerifyConfig verify;
  MeshConfig mesh;
  LineConfig line;
  std::optional<EulerianConfig> eulerian;
  TraceConfig trace;
  std::uint64_t seed = 0;
  std::string report;  // report path; empty means stdout only
};

// Numbers may be JSON numbers or constant expressions such as "2*pi".
double config_number(const nlohmann::json& j, const std::string& key);

RunConfig load_config(const nlohmann::json& doc);
// Reads a file, or stdin when path is "-". Parse errors raise ConfigError,
// unreadable files IoError.
RunConfig load_config_file(const std::string& path);

}  // namespace mhdnat
