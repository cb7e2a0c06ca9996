#pragma once

#include "hpmpc/building_model.hpp"
#include "hpmpc/forecasting.hpp"
#include "hpmpc/heat_controller.hpp"
#include "hpmpc/hp_efficiency.hpp"
#include "hpmpc/scenario.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace hpmpc::plant {

/// Behavioral model of the commercial heat pump.
struct HpPlantConfig {
  double p_min_w = 200.0;
  double p_max_w = 2500.0;
  double nominal_capacity_w = 7000.0;
  int steps = 12;                   ///< evenly spaced power levels in [p_min, p_max]
  double level_interval_s = 60.0;   ///< at most one level change per interval
  double min_down_s = 600.0;
  double lpf_tau_s = 900.0;         ///< ambient reading filter
  double curve_a = 38.0;            ///< T_F = a - b * T_filtered
  double curve_b = 0.6;
  double t_forward_min = 25.0;
  double t_forward_max = 55.0;
  double emitter_ua_w_k = 141.0;    ///< floor loop, all circuits open
  double on_fraction = 1.0;         ///< start when demand >= this * heat at p_min
  double off_fraction = 0.7;        ///< stop when demand < this * heat at p_min
  double defrost_rate_per_h = 0.5;
  double defrost_below_c = 5.0;
  double defrost_duration_s = 480.0;
  double defrost_reverse_w = 1000.0;
  std::vector<double> dhw_minutes{330.0, 1290.0};  ///< 05:30 and 21:30
  double dhw_jitter_min = 15.0;
  double dhw_duration_s = 1800.0;
  double dhw_compressor_w = 2000.0;
  double rod_w = 10000.0;
  double start_delay_min_s = 3600.0;
  double start_delay_max_s = 7200.0;
  double efficiency_scale = 0.9;    ///< plant curve = scale * reference curve
  efficiency::HpEfficiencyFit fit = efficiency::reference_fit();
  double low_flow_cutout = 0.0;     ///< flow fraction below which it trips; 0 disables

  /// Throws ConfigError.
  void validate() const;
  [[nodiscard]] std::vector<double> power_levels() const;
  /// Delivered heat at the true ambient temperature.
  [[nodiscard]] double heat_w(double p_w, double t_amb_c) const;
};

/// First-order exponential filter, exact for a held input over dt.
double lpf_ambient(double t_in, double state, double tau_s, double dt_s);

double heat_curve(double t_filtered, const HpPlantConfig& cfg);

enum Event : unsigned {
  kEventNone = 0,
  kEventDefrost = 1u << 0,
  kEventDhw = 1u << 1,
  kEventRod = 1u << 2,
  kEventStart = 1u << 3,
  kEventStop = 1u << 4,
  kEventCutout = 1u << 5,
};

std::string events_to_string(unsigned events);

struct HpConditions {
  double t_amb_true = 0.0;
  double t_return = 20.0;
  double flow_fraction = 1.0;
  double time_s = 0.0;
  bool dhw_active = false;
};

struct HpState {
  double t_filtered = 40.0;
  bool on = false;
  int level = 0;
  double last_level_change_s = -1e18;
  double off_since_s = -1e18;
  bool blocked = true;
  double armed_at_s = 0.0;  ///< earliest start after the last release
  double defrost_until_s = -1e18;
};

struct HpStepResult {
  double dq_w = 0.0;   ///< heat into the floor
  double p_w = 0.0;    ///< compressor for space heating
  double p_dhw_w = 0.0;
  double demand_w = 0.0;
  double t_forward = 0.0;
  unsigned events = kEventNone;
};

/// One plant period of dt seconds.
HpStepResult hp_step(const heatctl::HeatCtlCommand& cmd, const HpConditions& c,
                     HpState& s, const HpPlantConfig& cfg, double dt_s,
                     std::mt19937_64& rng);

/// RK4 step of the continuous house model with held inputs.
building::Vec2 house_step(const building::ContinuousStateSpace& ss,
                          const building::Vec2& x, double dq_w,
                          const building::Disturbance& d, double dt_s);
building::Vec2 house_step(const building::ThermalParams& p,
                          const building::Vec2& x, double dq_w,
                          const building::Disturbance& d, double dt_s);

/// The reference house: 230 m^2 slab-heated single-family home.
building::ThermalParams reference_house();

// ---------------------------------------------------------------------------
// Closed loop
// ---------------------------------------------------------------------------

enum class Controller { Mpc, Benchmark };
const char* to_string(Controller c);
Controller controller_from_string(const std::string& s);

struct RunOptions {
  Controller controller = Controller::Mpc;
  int days = 0;  ///< 0 runs every scenario day
  std::uint64_t seed = 1;
  scenario::ComfortLevel comfort = scenario::comfort_preset(4);
  HpPlantConfig plant;
  building::ThermalParams house = reference_house();
  std::vector<double> room_areas;  ///< empty selects the default house
  double offset_gain_k = 0.8;      ///< room spread from valve imbalance
  double offset_tau_s = 4.0 * 3600.0;
  double appliance_w = 400.0;
  double initial_room_c = 22.0;
  double sensor_sigma_k = 0.05;

  // Controller knowledge, which may differ from the plant.
  building::ThermalParams model = reference_house();
  efficiency::HpEfficiencyFit model_fit = efficiency::reference_fit();
  forecasting::PvModel pv_model = scenario::synthetic_pv_plant();
  bool perturb = false;
  forecasting::Perturbation perturbation = forecasting::Perturbation::TempBias;
  double perturbation_magnitude = 0.0;

  int horizon = 48;
  double mip_gap = 1e-5;
  long node_limit = 20000;
  heatctl::HeatCtlConfig heat_ctl;
  double valve_price_gain = 1.0;  ///< EUR/K for the valve layer

  double thermostat_setpoint_c = 22.0;
  double thermostat_band_k = 0.5;

  /// Throws ConfigError.
  void validate() const;
};

/// One record per minute. Powers are means over the minute, temperatures
/// are taken at its end.
struct StepRecord {
  double time_s = 0.0;
  double t_room = 0.0;
  double t_floor = 0.0;
  double t_amb = 0.0;
  double t_artificial = 0.0;
  double dq_w = 0.0;
  double p_hp_w = 0.0;
  double p_dhw_w = 0.0;
  std::string mode;
  unsigned events = kEventNone;
  std::uint32_t valves = 0;  ///< bit i set when circuit i is open
  double buy = 0.0;
  double sell = 0.0;
};

struct HourRecord {
  double time_s = 0.0;
  double e_hp = 0.0;   ///< kWh, space heating compressor
  double e_dhw = 0.0;  ///< kWh, hot water (compressor or rod)
  double e_pv = 0.0;
  double e_app = 0.0;
  double e_import = 0.0;
  double e_export = 0.0;
  double q_heat = 0.0;    ///< kWh delivered to the floor
  double q_budget = 0.0;  ///< kWh planned for this hour (MPC only)
  double t_room = 0.0;    ///< hourly mean
  double t_amb = 0.0;
  double buy = 0.0;
  double sell = 0.0;
  bool slack_binding = false;
};

struct SimTrace {
  Controller controller = Controller::Mpc;
  std::uint64_t seed = 0;
  std::int64_t start_epoch_s = 0;
  int days = 0;
  std::vector<StepRecord> steps;
  std::vector<HourRecord> hours;
  int solve_failures = 0;
  long mip_nodes = 0;
};

/// Hierarchical MPC stack (supervisor hourly, valves every 15 min, heat
/// controller every minute) or the benchmark, against the 10 s plant.
/// Deterministic in `opts.seed`. Throws DataError on scenario gaps.
SimTrace run_closed_loop(const scenario::Scenario& sc, const RunOptions& opts);

/// Thermostat plus heat curve on the true ambient temperature.
SimTrace run_benchmark_controller(const scenario::Scenario& sc,
                                  const RunOptions& opts);

}  // namespace hpmpc::plant
