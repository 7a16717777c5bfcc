#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dualrep {

/// Raised for malformed configuration (maps to CLI exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Flat key = value configuration for one scenario run. Unknown keys are
/// rejected with the offending field path.
struct ScenarioConfig {
  std::string scenario;
  std::string representation = "both";  // position | momentum | both

  double mass = 1.0;
  double delta_x = 1.0;     // free packet width
  double stiffness = 1.0;   // harmonic K
  double slope = 0.5;       // linear a
  double cubic_strength = 0.1;
  double displacement = 3.0;  // coherent-state offset
  double gauge_shift = 0.7;   // constant scalar potential V0
  double charge = 2.0;
  double flux = 1.7;
  double line_charge_density = 0.8;
  double moment = 0.6;       // magnetic moment along z
  double polar_angle = 0.0;  // Berry loop polar angle (0 selects pi/2)

  int n_points = 512;
  double extent = 16.0;  // half extent of the position grid
  double dt = 0.002;
  double t_final = 2.0;
  int store_every = 25;

  int seed_count = 16;
  double seed_span = 0.99;  // probability mass covered by seeds
  int loop_samples = 800;

  std::string out_dir = "out";
  std::string formats = "csv,json";

  static ScenarioConfig defaults_for(const std::string& scenario);
  static ScenarioConfig from_file(const std::string& path,
                                  const std::vector<std::string>& overrides = {},
                                  const std::optional<std::string>& out_dir = {});
  static const std::vector<std::string>& scenario_names();
};

struct CheckResult {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct RunReport {
  std::string scenario;
  std::vector<CheckResult> checks;
  std::map<std::string, double> metrics;
  std::vector<std::string> files;
  double wall_ms = 0.0;

  bool all_pass() const;
  /// JSON serialization; wall-clock timing is the only field that varies
  /// between identical runs.
  std::string to_json() const;
};

/// Executes the scenario end to end and writes its output files.
RunReport run(const ScenarioConfig& config);

/// Stable catalogue of the built-in scenarios with defaults.
std::string list_scenarios();

}  // namespace dualrep
