#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dmnls/dynamics.hpp"

namespace dmnls {

enum class Preset {
  free_sanity,
  small_data_scatter_intercritical,
  small_data_scatter_subcritical,
  large_data_scatter,
  pce_check,
  decay_rates,
  nonscattering,
  time_reversal,
  blowup_dichotomy,
  ground_state,
  exponents_table,
};

std::string to_string(Preset preset);
Preset preset_from_string(const std::string& name);

/// Every problem found while reading a config, in file order.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

struct InitialData {
  enum class Kind { gaussian, sech, plane_wave, custom_file };
  Kind kind = Kind::gaussian;
  double amplitude = 1.0;
  double width = 1.0;
  /// Center per axis (second entry ignored in 1-D).
  std::array<double, 2> center{0.0, 0.0};
  /// Velocity phase exp(i v . x).
  std::array<double, 2> velocity{0.0, 0.0};
  /// Integer wave number per axis for plane waves.
  std::array<int, 2> mode{1, 0};
  std::string path;

  bool operator==(const InitialData&) const = default;
};

std::string to_string(InitialData::Kind kind);

/// Preset-specific knobs; each preset accepts a fixed subset of them.
struct CheckParams {
  double window_lo = 1.0;
  double window_hi = 4.0;
  /// Consecutive differences must fall below this fraction of the data norm.
  double relative_threshold = 1e-3;
  /// Time after which monotone decrease is required.
  double transient = 1.0;
  double conservation_mass_tol = 1e-8;
  double conservation_energy_tol = 1e-6;
  double field_tol = 1e-5;
  double energy_tol = 1e-6;
  double ju_slope_max = 0.6;
  double w_slope_max = -0.025;
  double slope_lo = -0.65;
  double slope_hi = -0.35;
  double lambda_small = 0.5;
  double lambda_large = 4.0;
  int bisection_steps = 4;
  double growth_factor = 10.0;
  double psi_width = 8.0;
  double psi_center = 0.0;
  double S = 8.0;
  int nodes_per_unit = 16;
  int max_iterations = 3000;
  double optimizer_tol = 1e-10;
  std::vector<int> dimensions{1, 2, 3};
  std::vector<double> powers{1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 8.0, 10.0};
  /// Names of checks whose failure makes the run exit nonzero; empty = all.
  std::vector<std::string> hard_fail;

  bool operator==(const CheckParams&) const = default;
};

struct CheckpointSchedule {
  /// Explicit times; when empty, `count` evenly spaced times from 0 to t_final.
  std::vector<double> times;
  int count = 101;

  bool operator==(const CheckpointSchedule&) const = default;
};

struct RunConfig {
  Preset preset = Preset::free_sanity;
  int dimension = 1;
  double power = 4.0;
  NonlinearitySign sign = NonlinearitySign::defocusing;
  int sigma_nodes = 16;
  double nonlinearity_weight = 1.0;
  int points = 2048;
  double length = 256.0;
  StepperConfig stepper;
  InitialData initial;
  double t_final = 1.0;
  CheckpointSchedule checkpoints;
  CheckParams checks;
  std::string output_dir = "out";
  std::uint64_t rng_seed = 0;

  ModelParams model() const;
  GridPtr make_grid() const;
  /// Checkpoint times in the direction of t_final, excluding duplicates.
  std::vector<double> checkpoint_times() const;
  /// Field for the configured initial data on the configured grid.
  ComplexField initial_field() const;
  /// Stable 64-bit FNV-1a hash of the serialized form.
  std::uint64_t hash() const;
};

bool operator==(const StepperConfig& a, const StepperConfig& b);
bool operator==(const RunConfig& a, const RunConfig& b);

/// Parses TOML text; `origin` labels error messages. Throws ConfigError with
/// every problem found (syntax, unknown keys, type and preset constraints).
RunConfig parse_config_string(const std::string& text, const std::string& origin = "<string>");
RunConfig parse_config(const std::string& path);

/// Complete TOML rendering with every default spelled out.
std::string serialize(const RunConfig& config);

/// Preset constraints on an already-built config; returns every violation.
std::vector<std::string> validate(const RunConfig& config);

}  // namespace dmnls
