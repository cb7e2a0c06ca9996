#pragma once

#include "hpmpc/building_model.hpp"

namespace hpmpc::estimation {

using building::Mat2;
using building::Vec2;

/// Filter estimate of (T_room, T_floor) with its covariance.
struct KalmanState {
  Vec2 x = Vec2::Zero();
  Mat2 p = Mat2::Identity();
  double time_s = 0.0;
};

struct NoiseConfig {
  Mat2 q_proc = (Mat2() << 1e-4, 0.0, 0.0, 1e-5).finished();  ///< K^2 per step
  double r_meas = 1e-2;                                         ///< K^2
};

/// Default filter period, matching a 5 min update.
inline constexpr double kFilterPeriodS = 300.0;

struct Observability {
  Mat2 matrix;
  int rank = 0;
};

/// [C; CA] with C = [1 0] and its numerical rank (tolerance 1e-10).
/// Does not validate the parameters, so decoupled models report rank 1.
Observability observability_matrix(const building::ContinuousStateSpace& ss);

/// Time update. Throws DomainError when the covariance is not PSD.
KalmanState kf_predict(const KalmanState& s, double q_hp_w,
                       const building::Disturbance& d,
                       const building::DiscreteStateSpace& model,
                       const NoiseConfig& noise);

/// Measurement update with C = [1 0], Joseph form.
KalmanState kf_update(const KalmanState& s, double y_room,
                      const NoiseConfig& noise);

/// Innovation y - C x of the most recent update; handy for whiteness tests.
double innovation(const KalmanState& prior, double y_room);

}  // namespace hpmpc::estimation
