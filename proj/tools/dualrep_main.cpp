#include "dualrep/scenario.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace {

int execute(const dualrep::ScenarioConfig& config) {
  const dualrep::RunReport report = dualrep::run(config);
  for (const auto& check : report.checks)
    std::printf("%-4s %-40s value %.3e threshold %.3e\n",
                check.pass ? "PASS" : "FAIL", check.name.c_str(), check.value,
                check.threshold);
  std::printf("%s: %s (%.0f ms)\n", report.scenario.c_str(),
              report.all_pass() ? "all checks passed" : "CHECK FAILURE",
              report.wall_ms);
  return report.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dualrep: dual-representation quantum dynamics runner"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::vector<std::string> overrides;
  auto* run_cmd = app.add_subcommand("run", "run a scenario from a config file");
  run_cmd->add_option("config", config_path, "key = value config file")->required();
  run_cmd->add_option("--out", out_dir, "output directory (overrides config)");
  run_cmd->add_option("--override", overrides, "key=value config override");

  auto* list_cmd = app.add_subcommand("list", "list built-in scenarios");
  auto* check_cmd =
      app.add_subcommand("check", "run the built-in algebra identity suite");
  std::string check_out = "out";
  check_cmd->add_option("--out", check_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list_cmd->parsed()) {
      std::cout << dualrep::list_scenarios();
      return 0;
    }
    if (check_cmd->parsed()) {
      dualrep::ScenarioConfig config =
          dualrep::ScenarioConfig::defaults_for("algebra_checks");
      config.out_dir = check_out;
      return execute(config);
    }
    const dualrep::ScenarioConfig config = dualrep::ScenarioConfig::from_file(
        config_path, overrides,
        out_dir.empty() ? std::nullopt : std::optional<std::string>(out_dir));
    return execute(config);
  } catch (const dualrep::ConfigError& err) {
    std::fprintf(stderr, "config error: %s\n", err.what());
    return 2;
  } catch (const std::exception& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 1;
  }
}
