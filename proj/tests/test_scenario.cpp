#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dualrep/scenario.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace dualrep;
namespace fs = std::filesystem;

namespace {

std::string write_temp_config(const std::string& name, const std::string& body) {
  const fs::path dir = fs::temp_directory_path() / "dualrep_test_cfg";
  fs::create_directories(dir);
  const fs::path path = dir / name;
  std::ofstream out(path);
  out << body;
  return path.string();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config parsing") {
  SUBCASE("valid file with comments and overrides") {
    const std::string path = write_temp_config("ok.cfg",
                                               "# comment\n"
                                               "scenario = gauge_berry\n"
                                               "loop_samples = 400  # inline comment\n");
    const ScenarioConfig c =
        ScenarioConfig::from_file(path, {"polar_angle = 1.0"}, std::nullopt);
    CHECK(c.scenario == "gauge_berry");
    CHECK(c.loop_samples == 400);
    CHECK(c.polar_angle == 1.0);
  }
  SUBCASE("unknown keys are rejected with the field path") {
    const std::string path = write_temp_config("bad_key.cfg",
                                               "scenario = gauge_berry\n"
                                               "delta_x = 1.0\n");
    CHECK_THROWS_WITH_AS(ScenarioConfig::from_file(path),
                         doctest::Contains("gauge_berry.delta_x"), ConfigError);
  }
  SUBCASE("missing scenario rejected") {
    const std::string path = write_temp_config("none.cfg", "mass = 1.0\n");
    CHECK_THROWS_AS(ScenarioConfig::from_file(path), ConfigError);
  }
  SUBCASE("bad numeric and grid values rejected") {
    const std::string path = write_temp_config("bad_num.cfg",
                                               "scenario = free_gaussian\n"
                                               "dt = fast\n");
    CHECK_THROWS_AS(ScenarioConfig::from_file(path), ConfigError);
    const std::string path2 = write_temp_config("bad_n.cfg",
                                                "scenario = free_gaussian\n"
                                                "n_points = 100\n");
    CHECK_THROWS_AS(ScenarioConfig::from_file(path2), ConfigError);
    const std::string path3 = write_temp_config("bad_rep.cfg",
                                                "scenario = free_gaussian\n"
                                                "representation = sideways\n");
    CHECK_THROWS_AS(ScenarioConfig::from_file(path3), ConfigError);
  }
}

TEST_CASE("scenario catalogue") {
  const std::string listing = list_scenarios();
  for (const std::string& name : ScenarioConfig::scenario_names())
    CHECK(listing.find(name) != std::string::npos);
  CHECK(ScenarioConfig::scenario_names().size() == 9);
  CHECK(list_scenarios() == listing);  // byte-stable
}

TEST_CASE("gauge scenarios run clean end to end") {
  for (const char* name : {"gauge_ab_vector", "gauge_ac", "gauge_berry"}) {
    ScenarioConfig c = ScenarioConfig::defaults_for(name);
    c.out_dir = (fs::temp_directory_path() / "dualrep_gauge_out").string();
    const RunReport report = run(c);
    CHECK(report.all_pass());
    CHECK(report.scenario == name);
  }
}

TEST_CASE("free gaussian scenario report carries the momentum checks") {
  ScenarioConfig c = ScenarioConfig::defaults_for("free_gaussian");
  c.n_points = 256;
  c.t_final = 0.5;
  c.store_every = 50;
  c.seed_count = 8;
  c.out_dir = (fs::temp_directory_path() / "dualrep_fg_out").string();
  const RunReport report = run(c);
  bool saw_jp = false;
  for (const auto& check : report.checks)
    if (check.name == "jp_max_abs") {
      saw_jp = true;
      CHECK(check.threshold == 1e-12);
      CHECK(check.pass);
    }
  CHECK(saw_jp);
  CHECK(report.all_pass());
  CHECK(fs::exists(fs::path(c.out_dir) / "report.json"));
  CHECK(fs::exists(fs::path(c.out_dir) / "fields_x.csv"));
  CHECK(fs::exists(fs::path(c.out_dir) / "trajectories_x.csv"));
}

TEST_CASE("identical configs produce byte-identical numeric outputs") {
  auto run_into = [](const std::string& dir) {
    ScenarioConfig c = ScenarioConfig::defaults_for("free_gaussian");
    c.n_points = 256;
    c.t_final = 0.25;
    c.store_every = 25;
    c.seed_count = 6;
    c.out_dir = dir;
    return run(c);
  };
  const fs::path base = fs::temp_directory_path() / "dualrep_det";
  run_into((base / "a").string());
  run_into((base / "b").string());
  for (const char* name : {"fields_x.csv", "fields_p.csv", "trajectories_x.csv"}) {
    const std::string a = slurp(base / "a" / name);
    const std::string b = slurp(base / "b" / name);
    CHECK(a.size() > 0);
    CHECK(a == b);
  }
  // Reports agree except for the wall-clock timing and the output paths.
  std::istringstream ra(slurp(base / "a" / "report.json"));
  std::istringstream rb(slurp(base / "b" / "report.json"));
  std::string la, lb;
  while (std::getline(ra, la) && std::getline(rb, lb)) {
    if (la.find("wall_ms") != std::string::npos) continue;
    if (la.find("dualrep_det") != std::string::npos) continue;  // file paths
    CHECK(la == lb);
  }
}
