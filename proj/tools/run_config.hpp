#pragma once

#include "hpmpc/plant_sim.hpp"
#include "hpmpc/scenario.hpp"

#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"

namespace hpmpc::cli {

using nlohmann::json;

/// Everything `simulate` needs, resolved from a JSON file. Relative paths
/// are taken relative to the file's directory.
struct RunConfig {
  std::optional<std::filesystem::path> scenario_path;
  /// Paths as written in the file, so the echo does not depend on where the
  /// command runs; the scenario content enters through its digest.
  std::string scenario_ref;
  std::string scenario_digest;
  std::string thermal_fit_ref;
  std::string hp_fit_ref;
  std::string pv_fit_ref;
  scenario::GeneratorConfig generator;
  std::uint64_t generator_seed = 1;
  plant::RunOptions run;
  std::optional<std::filesystem::path> thermal_fit;
  std::optional<std::filesystem::path> hp_fit;
  std::optional<std::filesystem::path> pv_fit;
  std::string output_dir;

  /// Canonical echo with defaults filled in.
  [[nodiscard]] json resolved() const;
};

/// Throws ConfigError for unknown keys, wrong types, bad values or missing
/// files; DataError when a referenced fit file does not parse.
RunConfig load_run_config(const std::filesystem::path& file);

/// Loads the scenario named by the config or generates it.
scenario::Scenario load_scenario(const RunConfig& c);

json to_json(const building::ThermalParams& p);
building::ThermalParams thermal_params_from_json(const json& j);
json to_json(const efficiency::HpEfficiencyFit& f);
efficiency::HpEfficiencyFit hp_fit_from_json(const json& j);
json to_json(const forecasting::PvModel& m);
forecasting::PvModel pv_model_from_json(const json& j);

/// Reads and parses a JSON file; DataError on syntax errors.
json read_json(const std::filesystem::path& file);

}  // namespace hpmpc::cli
