#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "dmnls/config.hpp"
#include "dmnls/exponents.hpp"
#include "dmnls/ground_state.hpp"

namespace dmnls {

enum ExitCode : int { exit_pass = 0, exit_check_failed = 1, exit_config_error = 2, exit_runtime_error = 3 };

struct CheckOutcome {
  std::string name;
  bool passed = false;
  /// Hard checks decide the exit status; soft ones are observations.
  bool hard = true;
  std::string detail;
};

struct RunResult {
  std::string status;  // "pass", "check_failed", "runtime_error"
  std::string failed_stage;
  std::string message;
  std::vector<CheckOutcome> checks;
  /// Paths relative to the output directory.
  std::vector<std::string> files;
  nlohmann::json summary;

  int exit_code() const;
};

/// Runs the preset pipeline and writes its artifacts plus manifest.json into
/// config.output_dir. Runtime failures are caught and recorded, never thrown.
RunResult run(const RunConfig& config);

/// Evolves the configured initial data with the configured schedule.
Trajectory simulate(const RunConfig& config);

struct BlowupProbe {
  double lambda = 0.0;
  RunStatus forward = RunStatus::completed;
  RunStatus backward = RunStatus::completed;
  double forward_growth = 1.0;
  double backward_growth = 1.0;
  std::string forward_reason;
  std::string backward_reason;

  bool blows_up_forward() const { return forward == RunStatus::blowup_detected; }
  bool blows_up_both() const { return blows_up_forward() && backward == RunStatus::blowup_detected; }
};

/// Evolves lambda * (initial data) to +t_final and -t_final.
BlowupProbe probe_blowup(const RunConfig& config, double lambda, bool both_directions = true);

nlohmann::json to_json(const ExponentReport& report);
nlohmann::json to_json(const GroundStateResult& result, bool include_history = true);

/// Sech profile of the same mass and width scale, used as the alternative start.
ComplexField alternate_initial(const RunConfig& config);

struct BatchItem {
  std::string config_path;
  int exit_code = 0;
  std::string message;
};

/// Runs every *.toml in `dir` (sorted by name), at most `workers` at a time.
std::vector<BatchItem> run_batch(const std::string& dir, int workers);

/// DMNLS_MAX_WORKERS if set and positive, else hardware concurrency (>= 1).
int worker_cap_from_env();

}  // namespace dmnls
