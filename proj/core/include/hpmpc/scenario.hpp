#pragma once

#include "hpmpc/forecasting.hpp"
#include "hpmpc/pricing.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace hpmpc::scenario {

/// Hourly comfort reference and discomfort price for one preset.
struct ComfortLevel {
  int level = 4;
  pricing::Hourly t_ref{};
  pricing::Hourly c_cmf{};  ///< EUR/(K^2 h)
  double below = 1.5;       ///< soft box T_ref - below .. T_ref + above
  double above = 2.5;
};

/// Presets 1..4, from lenient to strict; 4 is the default.
ComfortLevel comfort_preset(int level);

/// Hourly inputs for a simulation: weather, spot price and CO2 intensity,
/// measured PV. Covers `days` plus `lookahead_days` so a planning horizon
/// never runs off the end.
struct Scenario {
  std::int64_t start_epoch_s = 0;  ///< midnight of the first day, UTC
  int days = 0;
  int lookahead_days = 2;
  forecasting::WeatherSeries weather;  ///< one point per hour
  std::vector<double> spot;            ///< EUR/kWh
  std::vector<double> co2;             ///< kg/kWh
  std::vector<double> pv_w;            ///< mean PV output per hour
  pricing::PriceInputs price_template; ///< tariff, fees; spot/co2 overwritten per day

  [[nodiscard]] int hours() const { return static_cast<int>(weather.size()); }
  [[nodiscard]] std::vector<double> buy() const;
  [[nodiscard]] std::vector<double> sell() const;
  /// Throws DataError on length mismatches or gaps.
  void validate() const;
};

struct GeneratorConfig {
  int days = 30;
  int lookahead_days = 2;
  std::int64_t start_epoch_s = 1672531200;  ///< 2023-01-01T00:00:00Z
  double mean_temp_c = 5.0;
  double daily_ar = 0.7;
  double daily_sigma_c = 2.0;
  double diurnal_amplitude_c = 3.0;
  double peak_irradiance = 400.0;  ///< W/m^2 at solar noon, clear sky
  double sunrise_h = 8.5;
  double sunset_h = 16.0;
  double spot_night = 0.05;
  double spot_day = 0.15;
  double spot_evening = 0.25;
  double spot_noise = 0.05;  ///< relative
  double pv_peak_w = 4000.0;
};

/// PV plant used to turn synthetic weather into measured output.
forecasting::PvModel synthetic_pv_plant(double p_peak_w = 4000.0);

Scenario generate(const GeneratorConfig& cfg, std::uint64_t seed);

/// ISO-8601 UTC timestamp "YYYY-MM-DDTHH:MM:SSZ".
std::string iso8601(std::int64_t epoch_s);
/// Parses the format above (also without the trailing Z). Throws DataError.
std::int64_t parse_iso8601(const std::string& s);

}  // namespace hpmpc::scenario
