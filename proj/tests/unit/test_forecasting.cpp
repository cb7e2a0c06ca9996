#include "hpmpc/error.hpp"
#include "hpmpc/forecasting.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace hpmpc::forecasting;

namespace {

WeatherSeries hourly_weather(int days, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  WeatherSeries w;
  for (int h = 0; h < 24 * days; ++h) {
    const double hod = h % 24;
    const double sun = hod >= 8 && hod <= 16 ? 500.0 * std::sin((hod - 8) / 8.0 * M_PI) : 0.0;
    w.push_back({3600.0 * h, 4.0 + 2.0 * u(rng), sun * (0.5 + 0.5 * u(rng)), u(rng)});
  }
  return w;
}

}  // namespace

TEST(PvModel, ExactRecoveryOfLinearData) {
  const WeatherSeries w = hourly_weather(10, 1);
  std::vector<double> pv;
  for (const auto& p : w) pv.push_back(15.0 + 1.5 * p.i_dir + 4.0 * p.i_dir * (1.0 - p.cloud));
  const PvModel m = fit_pv_model(w, pv, 4000.0);
  EXPECT_NEAR(m.coef[1], 1.5, 1e-8);
  EXPECT_NEAR(m.coef[2], 4.0, 1e-8);
  // R^2 on the daylight training rows.
  double ss_res = 0.0, ss_tot = 0.0, mean = 0.0;
  int n = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i].i_dir > 0.0) {
      mean += pv[i];
      ++n;
    }
  }
  mean /= n;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i].i_dir <= 0.0) continue;
    const double e = predict_pv(m, w[i]) - std::min(pv[i], 4000.0);
    ss_res += e * e;
    ss_tot += (pv[i] - mean) * (pv[i] - mean);
  }
  EXPECT_GE(1.0 - ss_res / ss_tot, 0.99);
}

TEST(PvModel, PredictionClampedToPlantRange) {
  PvModel m;
  m.coef = {-50.0, 10.0, 10.0};
  m.p_peak_w = 4000.0;
  EXPECT_DOUBLE_EQ(predict_pv(m, {0.0, 0.0, 0.0, 0.0}), 0.0);
  EXPECT_DOUBLE_EQ(predict_pv(m, {0.0, 0.0, 900.0, 0.0}), 4000.0);
}

TEST(PvModel, NightOnlyHistoryRejected) {
  WeatherSeries w = hourly_weather(10, 2);
  for (auto& p : w) p.i_dir = 0.0;
  std::vector<double> pv(w.size(), 0.0);
  EXPECT_THROW(fit_pv_model(w, pv, 4000.0), hpmpc::DataError);
  std::vector<double> short_pv(3, 0.0);
  EXPECT_THROW(fit_pv_model(w, short_pv, 4000.0), hpmpc::DataError);
}

TEST(Perturb, ZeroMagnitudeIsIdentity) {
  const WeatherSeries w = hourly_weather(2, 3);
  for (auto kind : {Perturbation::CloudBias, Perturbation::TempBias, Perturbation::CloudFlip}) {
    const WeatherSeries p = perturb_forecast(w, kind, 0.0, 9);
    for (std::size_t i = 0; i < w.size(); ++i) {
      EXPECT_EQ(p[i].cloud, w[i].cloud);
      EXPECT_EQ(p[i].t_amb, w[i].t_amb);
    }
  }
}

TEST(Perturb, DeterministicInSeed) {
  const WeatherSeries w = hourly_weather(2, 3);
  const WeatherSeries a = perturb_forecast(w, Perturbation::CloudFlip, 0.4, 17);
  const WeatherSeries b = perturb_forecast(w, Perturbation::CloudFlip, 0.4, 17);
  for (std::size_t i = 0; i < w.size(); ++i) EXPECT_EQ(a[i].cloud, b[i].cloud);
}

TEST(Perturb, LessCloudRaisesPvForecast) {
  WeatherSeries w = hourly_weather(1, 4);
  for (auto& p : w) p.cloud = 0.9;
  const PvModel m{{0.0, 2.0, 6.0}, 4000.0};
  const WeatherSeries clear = perturb_forecast(w, Perturbation::CloudBias, -0.5, 1);
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i].i_dir > 0.0) EXPECT_GT(predict_pv(m, clear[i]), predict_pv(m, w[i]));
    EXPECT_NEAR(clear[i].cloud, 0.4, 1e-12);
  }
  const WeatherSeries warm = perturb_forecast(w, Perturbation::TempBias, 1.5, 1);
  EXPECT_NEAR(warm[0].t_amb - w[0].t_amb, 1.5, 1e-12);
}

TEST(Weather, ValidationNamesTheRow) {
  WeatherSeries w = hourly_weather(1, 5);
  w[3].cloud = 1.2;
  EXPECT_THROW(validate(w), hpmpc::DataError);
  w = hourly_weather(1, 5);
  w[4].time_s = w[3].time_s;
  try {
    validate(w);
    FAIL();
  } catch (const hpmpc::DataError& e) {
    EXPECT_NE(std::string(e.what()).find("row 4"), std::string::npos);
  }
}
