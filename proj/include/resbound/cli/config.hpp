#pragma once

// Run configuration: a JSON document layered as defaults <- config file <-
// --set overrides, then validated into typed parameter blocks.

#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "resbound/homodyne.hpp"
#include "resbound/lineshapes.hpp"
#include "resbound/minimum_phase.hpp"
#include "resbound/oracle_grid.hpp"
#include "resbound/sensitivity.hpp"

namespace resbound::cli {

/// Configuration or validation failure; the message starts with the field path.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct LineshapeConfig {
  std::string family = "lorentzian";  ///< lorentzian | butterworth | tabulated
  int order = 3;                      ///< Butterworth only
  double T_res = 1.0;
  double T_off = 0.0;
  std::string table;  ///< tabulated only: path to a two-column (L, T) file
};

struct BoundsConfig {
  double T_min = 0.0;
  double T_max = 1.0;
  int T_count = 11;
  std::vector<double> s_values;
  double N = 1.0;
};

struct MaxVsSConfig {
  double s_min = 0.0;
  double s_max = 3.0;
  int count = 61;
};

struct FomMapConfig {
  int order = 1;
  int grid_n = 101;
};

struct EqefSweepConfig {
  int samples = 100;
  double eta_min = kSweepEtaMin;
};

struct KkPhaseConfig {
  double step = 0.01;
  double kernel_abs_tol = 1e-8;
  double max_discrepancy = 2e-3;
};

struct VerifyConfig {
  OracleGrid oracle;
  double phase_tolerance = 1e-6;
  double transmission_tolerance = 1e-3;
  SaturationGrid saturation;
  double saturation_tolerance = 1e-10;
};

struct RunConfig {
  nlohmann::json resolved;  ///< full configuration after overrides, echoed in sidecars
  std::string output_dir;
  std::string stem;  ///< empty selects the command's default stem
  LineshapeConfig lineshape;
  double s = 2.0;
  LossBudget losses;
  double display_N = 1.0;
  SearchOptions search;
  FftPhaseOptions fft;
  BoundsConfig bounds;
  MaxVsSConfig max_vs_s;
  FomMapConfig fom_map;
  EqefSweepConfig eqef_sweep;
  KkPhaseConfig kk_phase;
  VerifyConfig verify;

  /// Lineshape selected by the lineshape block.
  LineshapeSpec make_lineshape() const;
};

nlohmann::json default_config();

/// Applies "key.path=value" to cfg. The value is parsed as JSON and falls back
/// to a plain string. Throws ConfigError for unknown keys or type changes.
void apply_override(nlohmann::json& cfg, const std::string& assignment);

/// Layers file_text (may be empty) and overrides over the defaults and
/// validates the result.
RunConfig load_config(const std::string& file_text, const std::vector<std::string>& overrides);

/// Validates a resolved JSON document into typed blocks.
RunConfig parse_config(const nlohmann::json& resolved);

}  // namespace resbound::cli
