#include "hpmpc/forecasting.hpp"

#include "hpmpc/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

namespace hpmpc::forecasting {

void validate(const WeatherSeries& w) {
  for (std::size_t i = 0; i < w.size(); ++i) {
    const auto& p = w[i];
    if (!std::isfinite(p.time_s) || !std::isfinite(p.t_amb) ||
        !std::isfinite(p.i_dir) || !std::isfinite(p.cloud)) {
      throw DataError("weather row " + std::to_string(i) + " has a missing value");
    }
    if (p.cloud < 0.0 || p.cloud > 1.0) {
      throw DataError("weather row " + std::to_string(i) + ": cloud outside [0, 1]");
    }
    if (p.i_dir < 0.0) {
      throw DataError("weather row " + std::to_string(i) + ": negative irradiance");
    }
    if (i > 0 && !(p.time_s > w[i - 1].time_s)) {
      throw DataError("weather timestamps must be strictly increasing (row " +
                      std::to_string(i) + ")");
    }
  }
}

namespace {

Eigen::Vector3d features(const WeatherPoint& w) {
  return {1.0, w.i_dir, w.i_dir * (1.0 - w.cloud)};
}

}  // namespace

PvModel fit_pv_model(std::span<const WeatherPoint> weather,
                     std::span<const double> pv_w, double p_peak_w) {
  if (weather.size() != pv_w.size()) {
    throw DataError("PV history and weather have different lengths");
  }
  if (!(p_peak_w > 0.0)) throw DomainError("PV peak power must be positive");
  std::set<long long> days;
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < weather.size(); ++i) {
    if (!std::isfinite(pv_w[i])) continue;
    rows.push_back(i);
    if (weather[i].i_dir > 0.0) {
      days.insert(static_cast<long long>(std::floor(weather[i].time_s / 86400.0)));
    }
  }
  if (days.size() < 7) {
    throw DataError("PV fit needs daylight samples on at least 7 days, got " +
                    std::to_string(days.size()));
  }
  Eigen::MatrixXd x(rows.size(), 3);
  Eigen::VectorXd y(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    x.row(static_cast<Eigen::Index>(r)) = features(weather[rows[r]]).transpose();
    y[static_cast<Eigen::Index>(r)] = pv_w[rows[r]];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  if (qr.rank() < 2) {
    throw DataError("PV fit: irradiance features have no variation");
  }
  const Eigen::Vector3d c = qr.solve(y);
  PvModel m;
  m.coef = {c[0], c[1], c[2]};
  m.p_peak_w = p_peak_w;
  return m;
}

double predict_pv(const PvModel& m, const WeatherPoint& w) {
  const Eigen::Vector3d f = features(w);
  const double v = m.coef[0] * f[0] + m.coef[1] * f[1] + m.coef[2] * f[2];
  return std::clamp(v, 0.0, m.p_peak_w);
}

std::vector<double> predict_pv(const PvModel& m,
                               std::span<const WeatherPoint> w) {
  std::vector<double> out;
  out.reserve(w.size());
  for (const auto& p : w) out.push_back(predict_pv(m, p));
  return out;
}

WeatherSeries perturb_forecast(const WeatherSeries& w, Perturbation kind,
                               double magnitude, std::uint64_t seed) {
  if (!std::isfinite(magnitude)) throw DomainError("perturbation magnitude not finite");
  if (kind != Perturbation::TempBias && std::abs(magnitude) > 1.0) {
    throw DomainError("cloud perturbation magnitude must lie in [-1, 1]");
  }
  WeatherSeries out = w;
  if (magnitude == 0.0) return out;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto& p : out) {
    switch (kind) {
      case Perturbation::CloudBias:
        p.cloud = std::clamp(p.cloud + magnitude, 0.0, 1.0);
        break;
      case Perturbation::TempBias:
        p.t_amb += magnitude;
        break;
      case Perturbation::CloudFlip:
        if (u(rng) < std::abs(magnitude)) p.cloud = 1.0 - p.cloud;
        break;
    }
  }
  return out;
}

}  // namespace hpmpc::forecasting
