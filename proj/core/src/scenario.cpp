#include "hpmpc/scenario.hpp"

#include "hpmpc/error.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

namespace hpmpc::scenario {

ComfortLevel comfort_preset(int level) {
  ComfortLevel c;
  c.level = level;
  double day = 0.0;
  double night = 0.0;
  double price = 0.0;
  switch (level) {
    case 1:
      day = night = 20.5;
      price = 0.05;
      break;
    case 2:
      day = night = 21.0;
      price = 0.1;
      break;
    case 3:
      day = 21.5;
      night = 21.0;
      price = 0.2;
      break;
    case 4:
      day = 22.0;
      night = 21.5;
      price = 0.3;
      break;
    default:
      throw ConfigError("comfort level must be 1, 2, 3 or 4");
  }
  for (int h = 0; h < 24; ++h) {
    c.t_ref[h] = (h >= 6 && h < 22) ? day : night;
    c.c_cmf[h] = price;
  }
  return c;
}

std::vector<double> Scenario::buy() const {
  std::vector<double> out;
  out.reserve(spot.size());
  for (std::size_t d = 0; d * 24 < spot.size(); ++d) {
    pricing::PriceInputs p = price_template;
    for (int h = 0; h < 24; ++h) {
      p.spot[h] = spot[d * 24 + h];
      p.co2_intensity[h] = co2[d * 24 + h];
    }
    const auto b = pricing::buy_price(p);
    out.insert(out.end(), b.begin(), b.end());
  }
  return out;
}

std::vector<double> Scenario::sell() const { return spot; }

void Scenario::validate() const {
  const auto n = weather.size();
  if (n == 0 || n % 24 != 0) {
    throw DataError("scenario must hold whole days of hourly data");
  }
  if (spot.size() != n || co2.size() != n || pv_w.size() != n) {
    throw DataError("scenario price, CO2 and PV series must match the weather length");
  }
  if (static_cast<int>(n) != (days + lookahead_days) * 24) {
    throw DataError("scenario length does not match days plus lookahead");
  }
  forecasting::validate(weather);
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(weather[i].time_s - (start_epoch_s + 3600.0 * i)) > 0.5) {
      throw DataError("scenario weather is not on a contiguous hourly grid (row " +
                      std::to_string(i) + ")");
    }
    if (!std::isfinite(spot[i]) || !std::isfinite(co2[i]) || !std::isfinite(pv_w[i])) {
      throw DataError("scenario has a missing value at hour " + std::to_string(i));
    }
  }
  price_template.validate();
}

forecasting::PvModel synthetic_pv_plant(double p_peak_w) {
  forecasting::PvModel m;
  m.coef = {0.0, 2.0, 6.0};
  m.p_peak_w = p_peak_w;
  return m;
}

Scenario generate(const GeneratorConfig& cfg, std::uint64_t seed) {
  if (cfg.days < 1) throw ConfigError("scenario needs at least one day");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  Scenario s;
  s.start_epoch_s = cfg.start_epoch_s;
  s.days = cfg.days;
  s.lookahead_days = cfg.lookahead_days;
  const forecasting::PvModel pv = synthetic_pv_plant(cfg.pv_peak_w);
  const int total_days = cfg.days + cfg.lookahead_days;
  double anomaly = cfg.daily_sigma_c * normal(rng);
  double cloud_level = unif(rng);
  for (int d = 0; d < total_days; ++d) {
    anomaly = cfg.daily_ar * anomaly +
              std::sqrt(1.0 - cfg.daily_ar * cfg.daily_ar) * cfg.daily_sigma_c * normal(rng);
    cloud_level = std::clamp(0.5 * cloud_level + 0.5 * unif(rng), 0.0, 1.0);
    const double mean = cfg.mean_temp_c + anomaly;
    for (int h = 0; h < 24; ++h) {
      forecasting::WeatherPoint w;
      w.time_s = static_cast<double>(cfg.start_epoch_s) + 3600.0 * (d * 24 + h);
      const double mid = h + 0.5;
      w.t_amb = mean +
                cfg.diurnal_amplitude_c *
                    std::cos(2.0 * std::numbers::pi * (mid - 15.0) / 24.0) +
                0.3 * normal(rng);
      if (mid > cfg.sunrise_h && mid < cfg.sunset_h) {
        w.i_dir = cfg.peak_irradiance *
                  std::sin(std::numbers::pi * (mid - cfg.sunrise_h) /
                           (cfg.sunset_h - cfg.sunrise_h));
      }
      w.cloud = std::clamp(cloud_level + 0.15 * normal(rng), 0.0, 1.0);
      s.weather.push_back(w);

      double base = cfg.spot_day;
      if (h < 6) {
        base = cfg.spot_night;
      } else if (h >= 17 && h < 21) {
        base = cfg.spot_evening;
      }
      s.spot.push_back(std::max(0.0, base * (1.0 + cfg.spot_noise * normal(rng))));
      s.co2.push_back(0.0);
      s.pv_w.push_back(forecasting::predict_pv(pv, w));
    }
  }
  s.validate();
  return s;
}

std::string iso8601(std::int64_t epoch_s) {
  using namespace std::chrono;
  const sys_seconds tp{seconds{epoch_s}};
  const auto day = floor<days>(tp);
  const year_month_day ymd{day};
  const hh_mm_ss hms{tp - day};
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02ldZ",
                static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()),
                static_cast<long>(hms.hours().count()),
                static_cast<long>(hms.minutes().count()),
                static_cast<long>(hms.seconds().count()));
  return buf;
}

std::int64_t parse_iso8601(const std::string& s) {
  int y = 0;
  unsigned mo = 0;
  unsigned d = 0;
  int hh = 0;
  int mm = 0;
  int ss = 0;
  char tail = 0;
  const int got = std::sscanf(s.c_str(), "%4d-%2u-%2uT%2d:%2d:%2d%c", &y, &mo, &d,
                              &hh, &mm, &ss, &tail);
  if (got < 6 || (got == 7 && tail != 'Z') || s.size() > 20) {
    throw DataError("timestamp '" + s + "' is not ISO-8601 (YYYY-MM-DDTHH:MM:SSZ)");
  }
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{mo}, day{d}};
  if (!ymd.ok() || hh > 23 || mm > 59 || ss > 59 || hh < 0 || mm < 0 || ss < 0) {
    throw DataError("timestamp '" + s + "' is out of range");
  }
  const sys_days sd{ymd};
  return sd.time_since_epoch().count() * 86400LL + hh * 3600LL + mm * 60LL + ss;
}

}  // namespace hpmpc::scenario
