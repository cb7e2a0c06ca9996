#pragma once

#include "hpmpc/numerics.hpp"

#include <Eigen/Dense>

#include <span>
#include <string>
#include <vector>

namespace hpmpc::building {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Lumped two-capacity house: an averaged room air node and a floor slab
/// node. Capacities in J/K, conductances in W/K, solar coefficients in m^2.
struct ThermalParams {
  double c_room = 0.0;
  double c_floor = 0.0;
  double u_room = 0.0;  ///< floor <-> room
  double u_amb = 0.0;   ///< room <-> ambient
  double g_sun = 0.0;   ///< multiplies cloud-attenuated irradiance
  double g_sun_dir = 0.0;  ///< multiplies direct irradiance

  /// Throws DomainError unless every parameter is strictly positive and finite.
  void validate() const;
};

/// x = (T_room, T_floor), u = heat flow into the floor [W],
/// d = (T_amb, I_sun, I_sun_dir).
struct ContinuousStateSpace {
  Eigen::Matrix2d a;
  Eigen::Vector2d b;
  Eigen::Matrix<double, 2, 3> e;
  Eigen::RowVector2d c;
};

/// Disturbance vector in the model's order.
struct Disturbance {
  double t_amb = 0.0;
  double i_sun = 0.0;      ///< I_dir * (1 - cloud) [W/m^2]
  double i_sun_dir = 0.0;  ///< I_dir [W/m^2]

  [[nodiscard]] Eigen::Vector3d vec() const { return {t_amb, i_sun, i_sun_dir}; }
};

/// Builds the disturbance from weather quantities. Throws DomainError when
/// cloud is outside [0, 1] or the irradiance is negative.
[[nodiscard]] Disturbance make_disturbance(double t_amb, double i_dir,
                                           double cloud);

ContinuousStateSpace assemble_state_space(const ThermalParams& p);

/// ZOH discretization of the house model at `dt_s`.
struct DiscreteStateSpace {
  Eigen::Matrix2d a;
  Eigen::Vector2d b;
  Eigen::Matrix<double, 2, 3> e;
  Eigen::RowVector2d c;
  double dt_s = 0.0;

  [[nodiscard]] Vec2 step(const Vec2& x, double q_hp_w,
                          const Disturbance& d) const {
    return a * x + b * q_hp_w + e * d.vec();
  }
};

DiscreteStateSpace discretize(const ContinuousStateSpace& ss, double dt_s);

/// Equilibrium state for constant heat input and disturbance.
[[nodiscard]] Vec2 steady_state(const ThermalParams& p, double q_hp_w,
                                const Disturbance& d);

/// Per-room areas [m^2], temperatures and references [degC].
struct ZoneSnapshot {
  std::vector<double> area_m2;
  std::vector<double> temperature_c;
  std::vector<double> reference_c;
};

/// Area-weighted average room temperature.
[[nodiscard]] double weighted_room_temperature(const ZoneSnapshot& z);

/// Solar heat gain [W]: g1 * I_dir * (1 - cloud) + g2 * I_dir.
[[nodiscard]] double solar_gain(double i_dir, double cloud, double g_sun,
                                double g_sun_dir);

// ---------------------------------------------------------------------------
// Grey-box parameter identification
// ---------------------------------------------------------------------------

/// One sample of the identification series. NaN marks a missing value.
struct ThermalSample {
  double t_room = 0.0;
  double q_hp_w = 0.0;
  double t_amb = 0.0;
  double i_dir = 0.0;
  double cloud = 0.0;
};

struct FitOptions {
  double dt_s = 300.0;
  /// Prediction horizons (in samples) whose squared errors form the loss.
  std::vector<int> horizons{1, 12, 72};
  double floor_area_m2 = 230.0;
  double ceiling_height_m = 2.5;
  int max_iterations = 200;
  /// Samples at the start of each segment used only to settle the filter.
  int burn_in = 36;
  /// Longest run of missing samples that is linearly interpolated.
  int max_interpolated_gap = 4;
};

struct HorizonRmse {
  int steps = 0;
  double rmse_k = 0.0;
};

struct FitReport {
  ThermalParams params;
  ThermalParams initial_guess;
  std::vector<HorizonRmse> rmse;
  int segments = 0;
  int interpolated_samples = 0;
  int iterations = 0;
  double final_cost = 0.0;
  std::string notes;
};

/// Physically motivated starting point for the fit, derived from floor area:
/// slab capacity 0.4 MJ/(m^2 K), air volume x5 for furnishings, envelope
/// conductance from a 20 kWh/(m^2 yr) heat demand.
[[nodiscard]] ThermalParams initial_guess(const FitOptions& options);

/// Fits ThermalParams by minimizing multi-horizon room temperature
/// prediction error over log-parameters (Levenberg-Marquardt). The floor
/// state is reconstructed with a Kalman predictor along the series.
///
/// Throws DataError for fewer than 48 h of samples and FitError when the
/// series carries no excitation.
FitReport fit_thermal_params(std::span<const ThermalSample> series,
                             const FitOptions& options = {});

/// Multi-horizon prediction RMSE of `params` on `series` (same predictor as
/// the fit). Useful for validating a stored fit on new data.
std::vector<HorizonRmse> prediction_rmse(const ThermalParams& params,
                                         std::span<const ThermalSample> series,
                                         const FitOptions& options = {});

}  // namespace hpmpc::building
