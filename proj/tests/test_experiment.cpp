#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"

#include "bargmann/experiment/config.hpp"
#include "bargmann/experiment/report.hpp"
#include "bargmann/experiment/runner.hpp"

using namespace bargmann;
using namespace bargmann::experiment;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("bargmann_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("presets validate and round-trip through YAML") {
  const auto names = preset_names();
  CHECK(names.size() == 5);
  for (const auto& n : names) {
    const ExperimentConfig c = preset(n);
    CHECK_NOTHROW(validate(c));
    const std::string y = to_yaml(c);
    CHECK(to_yaml(parse_config(y)) == y);
  }
  CHECK_THROWS_AS(preset("nope"), ConfigError);
}

TEST_CASE("shipped configs match the presets") {
  for (const auto& n : preset_names()) {
    const fs::path file = fs::path(BARGMANN_CONFIG_DIR) / (n + ".yaml");
    CHECK_MESSAGE(to_yaml(load_config(file.string())) == to_yaml(preset(n)), n);
  }
}

TEST_CASE("config parsing and validation") {
  const std::string text = R"(
command: sweep
name: mini
seed: 42
backend: {kind: cp1}
family:
  kind: cp1-limit
  limit: [[-0.2, 0.1], 1]
ladder: [8, 32, 128]
grid: {points: 17, radius: 0.9}
thresholds: {metric_slope_min: -1.3}
)";
  const ExperimentConfig c = parse_config(text);
  CHECK(c.seed == 42);
  CHECK(c.backend.kind == "cp1");
  REQUIRE(c.family.limit.size() == 2);
  CHECK(c.family.limit[0] == cplx(-0.2, 0.1));
  CHECK(c.grid.points == 17);
  CHECK(c.diagnostics.subball == 0.5);  // default materialized
  CHECK_NOTHROW(validate(c));

  CHECK_THROWS_AS(parse_config("command: sweep\nbogus: 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("command: sweep\nladder: [4, x]\n"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.yaml"), ConfigError);

  ExperimentConfig bad = c;
  bad.ladder = {16, 4};
  CHECK_THROWS_AS(validate(bad), ConfigError);
  bad = c;
  bad.diagnostics.zero_tolerance = -1.0;
  CHECK_THROWS_AS(validate(bad), ConfigError);
  bad = c;
  bad.grid.radius = 1.5;
  CHECK_THROWS_AS(validate(bad), ConfigError);
  bad = c;
  bad.command = "dance";
  CHECK_THROWS_AS(validate(bad), ConfigError);

  CHECK(parse_int_list("4, 16,64") == std::vector<int>{4, 16, 64});
  CHECK_THROWS_AS(parse_int_list("4,,16"), ConfigError);
  CHECK(parse_double_list("0.5,-1e-3") == std::vector<double>{0.5, -1e-3});
}

TEST_CASE("overrides") {
  ExperimentConfig c = preset("torus1-ladder");
  Overrides o;
  o.seed = 9;
  o.ladder = std::vector<int>{2, 8, 32};
  o.grid = GridSpec{33, 0.8};
  o.epsilon = 0.01;
  RVec center(2);
  center << 0.1, 0.2;
  o.center = center;
  apply(c, o);
  CHECK(c.seed == 9);
  CHECK(c.ladder == std::vector<int>{2, 8, 32});
  CHECK(c.grid.points == 33);
  CHECK(c.diagnostics.epsilon.value() == 0.01);
  CHECK((c.center_for(2) - center).norm() == 0.0);
}

TEST_CASE("model-check passes and reports every check") {
  const Outcome o = execute(preset("model-check"));
  CHECK_FALSE(o.numeric_error.has_value());
  CHECK(o.passed());
  CHECK(o.exit_code() == 0);
  CHECK(o.checks.size() >= 5);
  const ModelCheckResult m = model_check(preset("model-check"));
  CHECK(m.polynomials >= 20);
  CHECK(m.fd_order > 1.8);
  CHECK(m.fd_order < 2.2);
}

TEST_CASE("renorm on the torus is exact") {
  ExperimentConfig c = preset("torus1-ladder");
  c.command = "renorm";
  c.name = "renorm-torus";
  c.grid = {17, 0.9};
  c.thresholds = {{"metric_c0_max", 1e-10}, {"connection_deviation_max", 1e-10}};
  validate(c);
  const Outcome o = execute(c);
  CHECK(o.passed());
  CHECK(o.summary.at("max_metric_c0") <= 1e-10);
}

TEST_CASE("numeric failures yield status 3 with a partial report") {
  ExperimentConfig c = preset("cp1-ladder");
  c.name = "off-atlas";
  c.ladder = {1, 2, 4};
  c.grid = {9, 0.9};
  c.centers = {(RVec(2) << 4.8, 0.0).finished()};
  validate(c);
  const Outcome o = execute(c);
  REQUIRE(o.numeric_error.has_value());
  CHECK(o.exit_code() == 3);
  const fs::path dir = scratch("numeric");
  write_outputs(o, dir);
  const auto j = nlohmann::json::parse(slurp(dir / "report.json"));
  CHECK(j["status"] == "numeric_failure");
  CHECK(j["exit_code"] == 3);
}

TEST_CASE("outputs: report, tables and manifest") {
  ExperimentConfig c = preset("torus1-ladder");
  c.grid = {33, 0.9};
  const Outcome o = execute(c);
  const fs::path dir = scratch("outputs");
  const auto files = write_outputs(o, dir);
  CHECK(files.size() == 3);
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest["seed"] == 1);
  CHECK(manifest["config_sha256"] == sha256_hex(to_yaml(c)));
  for (const auto& a : manifest["artifacts"]) {
    CHECK(a["sha256"] == sha256_hex(slurp(dir / a["path"].get<std::string>())));
  }
  const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
  CHECK(report["seed"] == 1);
  for (const auto& r : report["records"]) {
    CHECK(r["grid"]["points_per_axis"] == 33);
    CHECK(r.contains("tolerances"));
  }
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");

  const fs::path merged = scratch("merged");
  CHECK(merge_reports({dir}, merged) == 1);
  CHECK(slurp(merged / "summary.csv").find("torus1-ladder,sweep,1,") != std::string::npos);
}

TEST_CASE("report over zero inputs") {
  const fs::path out = scratch("empty_report");
  CHECK(merge_reports({}, out) == 0);
  CHECK(slurp(out / "summary.csv") == "name,command,seed,status\n");
  const auto j = nlohmann::json::parse(slurp(out / "summary.json"));
  CHECK(j["reports"].empty());
}

TEST_CASE("log-log slope") {
  CHECK(loglog_slope({8, 32, 128}, {1.0 / 8, 1.0 / 32, 1.0 / 128}) == doctest::Approx(-1.0).epsilon(1e-12));
}

}  // TEST_SUITE
