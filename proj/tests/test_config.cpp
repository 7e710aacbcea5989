#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include <gtest/gtest.h>

#include "mhdnat/families.hpp"
#include "mhdnat/io/config.hpp"

using namespace mhdnat;
using nlohmann::json;

namespace {

std::string error_key(const json& doc) {
  try {
    load_config(doc);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "<none>";
}

CheckOptions tight() {
  CheckOptions o;
  o.tolerance = 1e-6;
  return o;
}

}  // namespace

TEST(Config, PresetMatchesBuilder) {
  const RunConfig rc = load_config(json{{"family", "sol13"}});
  ASSERT_TRUE(rc.solution);
  const Solution ref = build_torus_knot(sol13_params());
  const Point4 p{0.4, 1.0, 2.0, 0.9};
  EXPECT_NEAR((eulerian_fields(*rc.solution, p).x - eulerian_fields(ref, p).x).norm(), 0.0, 1e-15);
  EXPECT_EQ(rc.family, "sol13");
  EXPECT_EQ(rc.verify.checks, (std::vector<std::string>{"incompressible", "eulerian", "cauchy"}));
}

TEST(Config, PresetOverrides) {
  const RunConfig rc = load_config(json{{"family", "sol13"}, {"params", {{"u", "0.5*s"}}}});
  EXPECT_TRUE(residual_incompressible(*rc.solution, rc.verify.grid, tight()).passed);
}

TEST(Config, ConstantExpressionNumbers) {
  EXPECT_NEAR(config_number(json("2*pi"), "x"), 2 * std::numbers::pi, 1e-15);
  EXPECT_DOUBLE_EQ(config_number(json(1.5), "x"), 1.5);
  EXPECT_THROW(config_number(json("xi1"), "x"), ConfigError);
  EXPECT_THROW(config_number(json::array(), "x"), ConfigError);
  const RunConfig rc = load_config(json{{"family", "sol13"}, {"line", {{"range", {0, "2*pi"}}}}});
  EXPECT_NEAR(rc.line.hi, 2 * std::numbers::pi, 1e-15);
}

TEST(Config, UnknownKeysNameTheirPath) {
  EXPECT_EQ(error_key(json{{"family", "sol13"}, {"colour", 1}}), "colour");
  EXPECT_EQ(error_key(json{{"family", "sol13"}, {"verify", {{"grid", {{"m", 3}}}}}}), "verify.grid.m");
  EXPECT_EQ(error_key(json{{"family", "sol13"}, {"pipeline", {{{"type", "time_shift"}, {"dx", 1}}}}}),
            "pipeline[0].dx");
  EXPECT_EQ(error_key(json{{"family", "jelly"}}), "family");
  EXPECT_EQ(error_key(json{{"family", "sol13"}, {"params", {{"A", "q + 1"}}}}), "params.A");
  EXPECT_EQ(error_key(json{{"family", "sol13"}, {"pipeline", {{{"type", "warp"}}}}}), "pipeline[0].type");
  EXPECT_EQ(error_key(json{{"family", "sol13"}, {"verify", {{"checks", {"bogus"}}}}}), "verify.checks[0]");
  EXPECT_EQ(error_key(json{{"params", json::object()}}), "family");
  EXPECT_EQ(error_key(json::array()), "<root>");
}

TEST(Config, PipelineAppliesInOrder) {
  const json doc{{"family", "sol13"},
                 {"pipeline",
                  {{{"type", "time_shift"}, {"dt", 0.5}},
                   {{"type", "galilean"}, {"alpha", {"t^2", "0", "0"}}},
                   {{"type", "dilation2"}, {"eps", 0.1}}}}};
  const RunConfig rc = load_config(doc);
  EXPECT_EQ(rc.steps, (std::vector<std::string>{"time_shift", "galilean", "dilation2"}));
  EXPECT_EQ(rc.solution->family, "torus_knot|time_shift|galilean|dilation2");
  EXPECT_TRUE(residual_incompressible(*rc.solution, rc.verify.grid, tight()).passed);
}

TEST(Config, PerturbationBreaksExactness) {
  const json doc{{"family", "sol13"}, {"perturb", {{"component", 0}, {"delta", "sin(xi1 + t)*xi3"}}}};
  const RunConfig rc = load_config(doc);
  const auto r = residual_incompressible(*rc.solution, rc.verify.grid, tight());
  EXPECT_FALSE(r.passed);
  EXPECT_EQ(error_key(json{{"family", "sol13"}, {"perturb", {{"component", 3}}}}), "perturb.component");
}

TEST(Config, ExplicitFamily) {
  const json doc{{"family", "explicit"},
                 {"params", {{"gamma", {"xi1", "xi2", "xi3"}}, {"rho", 1}, {"P", "2"}, {"f", "1"}}}};
  const RunConfig rc = load_config(doc);
  EXPECT_TRUE(residual_incompressible(*rc.solution, rc.verify.grid, tight()).passed);
  json both = doc;
  both["params"]["p"] = "1";
  EXPECT_EQ(error_key(both), "params");
}

TEST(Config, EulerianOnlySection) {
  const json doc{{"eulerian",
                  {{"B0", {"-y", "x", "0"}},
                   {"domain", {{"x", {-3, 3}}, {"y", {-3, 3}}, {"z", {-3, 3}}}},
                   {"seed_surface", {"xi3", "0", "xi2"}},
                   {"grid", {{"xi1", {{"lo", 0}, {"hi", "2*pi"}, {"n", 33}}},
                             {"xi2", {{"lo", -0.5}, {"hi", 0.5}, {"n", 3}}},
                             {"xi3", {{"lo", 0.5}, {"hi", 1.5}, {"n", 3}}}}}}}};
  const RunConfig rc = load_config(doc);
  EXPECT_FALSE(rc.solution);
  ASSERT_TRUE(rc.eulerian && rc.eulerian->seed);
  EXPECT_EQ(rc.eulerian->grid[0].n, 33);
  json bad = doc;
  bad["eulerian"]["grid"].erase("xi3");
  EXPECT_EQ(error_key(bad), "eulerian.grid.xi3");
}

TEST(Config, FileLoading) {
  namespace fs = std::filesystem;
  EXPECT_THROW(load_config_file("/nonexistent/config.json"), IoError);
  const fs::path p = fs::temp_directory_path() / "mhdnat_config_test.json";
  {
    std::ofstream(p) << "{\"family\": \"sol14\",";
  }
  try {
    load_config_file(p.string());
    ADD_FAILURE() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "<document>");
  }
  {
    std::ofstream(p) << R"({"family": "sol14", "seed": 7, "report": "out.json"})";
  }
  const RunConfig rc = load_config_file(p.string());
  EXPECT_EQ(rc.seed, 7u);
  EXPECT_EQ(rc.report, "out.json");
  fs::remove(p);
}
