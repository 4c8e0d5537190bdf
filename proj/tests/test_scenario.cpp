#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mixlab/error.hpp"
#include "mixlab/report.hpp"
#include "mixlab/scenario.hpp"

using namespace mixlab;
namespace fs = std::filesystem;

namespace {

const std::string kDir = MIXLAB_SCENARIO_DIR;

std::vector<fs::path> bundled() {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(kDir))
    if (e.path().extension() == ".toml") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

const char* kMinimal = R"(schema = 1
name = "tiny"

[grid]
dim = 1
nx = 8
x = [0.0, 1.0]
steps = 4
T = 0.1
)";

ErrorKind kind_of(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::InvalidInput;
}

}  // namespace

TEST_CASE("every bundled scenario round-trips") {
  const auto files = bundled();
  CHECK(files.size() == 10);
  for (const auto& p : files) {
    CAPTURE(p.string());
    const ScenarioFile f = load_scenario(p.string());
    CHECK(f.scenario.name == p.stem().string());
    const std::string text = serialize_scenario(f);
    const ScenarioFile g = parse_scenario(text, kDir);
    CHECK(g == f);
    CHECK(serialize_scenario(g) == text);
    CHECK(config_hash(g) == config_hash(f));
  }
}

TEST_CASE("minimal scenario takes the defaults") {
  const ScenarioFile f = parse_scenario(kMinimal);
  CHECK(f.schema == kSchemaVersion);
  CHECK(f.scenario.grid.nx() == 8);
  CHECK(f.scenario.grid.time_steps() == 4);
  CHECK(f.scenario.grid.final_time() == doctest::Approx(0.1));
  CHECK(f.scenario.mu.kind == "const");
  CHECK(f.queries.levels == 1);
  CHECK(query_point(f).x == doctest::Approx(0.5));
  CHECK(query_time(f) == doctest::Approx(0.05));
  CHECK(query_rho(f) == doctest::Approx(0.05));
  const BallFamily fam = audit_family(f);
  CHECK(fam.radii.size() >= 2);
}

TEST_CASE("rejections") {
  const std::string base = kMinimal;
  CHECK(kind_of(base + "bogus = 1\n") == ErrorKind::ScenarioError);
  CHECK(kind_of(base + "[grid2]\nnx = 4\n") == ErrorKind::ScenarioError);
  CHECK(kind_of(base + "[mu]\nkind = \"wiggle\"\n") == ErrorKind::ScenarioError);
  CHECK(kind_of(base + "[mu]\nkind = \"power\"\nexponent = 2.0\n") == ErrorKind::ScenarioError);
  CHECK(kind_of(base + "[mu]\nkind = power\n") == ErrorKind::ScenarioError);
  CHECK(kind_of(base + "[solver]\ntolerance = abc\n") == ErrorKind::ScenarioError);
  std::string v2 = base;
  v2.replace(v2.find("schema = 1"), 10, "schema = 2");
  CHECK(kind_of(v2) == ErrorKind::ScenarioError);
  std::string none = base;
  none.erase(0, none.find('\n') + 1);
  CHECK(kind_of(none) == ErrorKind::ScenarioError);
  CHECK_THROWS_AS(load_scenario(kDir + "/missing.toml"), Error);
}

TEST_CASE("config hash tracks the content") {
  const ScenarioFile f = parse_scenario(kMinimal);
  ScenarioFile g = f;
  g.queries.levels = 2;
  CHECK(config_hash(f) == config_hash(parse_scenario(kMinimal)));
  CHECK(config_hash(f) != config_hash(g));
  CHECK(config_hash(f).size() == 16);
}

TEST_CASE("report consolidation") {
  const fs::path dir = fs::temp_directory_path() / "mixlab_test_report";
  fs::remove_all(dir);
  fs::create_directories(dir);
  CHECK_THROWS_AS(consolidate(dir.string()), Error);
  CHECK_THROWS_AS(consolidate((dir / "nope").string()), Error);

  const ScenarioFile f = parse_scenario(kMinimal);
  Json rec = {{"command", "solve"}, {"provenance", provenance(f, 1)},
              {"levels", {{{"level", 0}, {"nx", 8}, {"residual", 1e-16}}}}};
  write_text((dir / "tiny" / "solve.json").string(), dump(rec));
  const Json c = consolidate(dir.string());
  REQUIRE(c["records"].size() == 1);
  CHECK(c["records"][0]["file"] == "tiny/solve.json");
  const std::string csv = summary_csv(c);
  std::istringstream in(csv);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "file,command,scenario,level,key,value");
  CHECK(lines[1] == "tiny/solve.json,solve,tiny,0,nx,8");
  CHECK(lines[2].rfind("tiny/solve.json,solve,tiny,0,residual,", 0) == 0);
  CHECK(number(1.0 / 0.0) == "inf");
  fs::remove_all(dir);
}
