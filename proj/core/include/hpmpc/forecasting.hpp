#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace hpmpc::forecasting {

struct WeatherPoint {
  double time_s = 0.0;  ///< seconds since the Unix epoch
  double t_amb = 0.0;   ///< degC
  double i_dir = 0.0;   ///< W/m^2
  double cloud = 0.0;   ///< 0..1
};

using WeatherSeries = std::vector<WeatherPoint>;

/// Strictly increasing time, cloud in [0, 1], finite values. Throws DataError.
void validate(const WeatherSeries& w);

/// PV output regression on {1, I_dir, I_dir (1 - cloud)}, clamped to
/// [0, p_peak] at prediction time.
struct PvModel {
  std::array<double, 3> coef{};
  double p_peak_w = 4000.0;
};

/// Throws DataError unless the history holds daylight samples on at least
/// seven distinct days with some irradiance variation.
PvModel fit_pv_model(std::span<const WeatherPoint> weather,
                     std::span<const double> pv_w, double p_peak_w);

double predict_pv(const PvModel& m, const WeatherPoint& w);
std::vector<double> predict_pv(const PvModel& m, std::span<const WeatherPoint> w);

enum class Perturbation { CloudBias, TempBias, CloudFlip };

/// Forecast-error injection. CloudBias shifts cloud (clamped), TempBias
/// shifts T_a, CloudFlip replaces cloud by 1 - cloud with probability
/// |magnitude| per step. Deterministic in `seed`.
WeatherSeries perturb_forecast(const WeatherSeries& w, Perturbation kind,
                               double magnitude, std::uint64_t seed);

}  // namespace hpmpc::forecasting
