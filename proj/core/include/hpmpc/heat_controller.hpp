#pragma once

#include <string>
#include <vector>

namespace hpmpc::heatctl {

enum class Mode { Active, StandbyDefrost, StandbyDhw, Blocked, Prestart };

const char* to_string(Mode m);

struct PidGains {
  double kp = 0.005;  ///< K/W
  double ki = 2e-5;   ///< K/(W s)
  double kd = 0.0;    ///< K s/W
  double out_min = -30.0;
  double out_max = 40.0;
};

struct PidState {
  double integral = 0.0;  ///< K
  double prev_error = 0.0;
  bool has_prev = false;
};

struct PidOutput {
  double t_artificial = 0.0;
  PidState state;
  bool saturated = false;
};

/// Heat-flow error (ref - meas) mapped to an artificial ambient temperature
/// below `bias`: a colder reading makes the heat curve ask for more heat.
/// The integrator is frozen whenever the output saturates in the direction
/// the error pushes (conditional integration).
PidOutput pid_step(double dq_meas_w, double dq_ref_w, const PidGains& g,
                   double dt_s, const PidState& s, double bias_c);

/// Power needed to finish the hourly budget in the minutes left.
double budget_step(double q_ref_hour_wh, double e_acc_wh, double minutes_left,
                   double dq_max_w);

/// Flags a defrost after two consecutive samples of reversed heat flow.
class DefrostDetector {
 public:
  explicit DefrostDetector(double threshold_w = 100.0, int samples = 2)
      : threshold_w_(threshold_w), samples_(samples) {}
  bool update(double dq_meas_w);
  [[nodiscard]] bool active() const { return count_ >= samples_; }

 private:
  double threshold_w_;
  int samples_;
  int count_ = 0;
};

/// Pure form of the detector: true iff the last `samples` values are all
/// below -threshold.
bool detect_defrost(const std::vector<double>& dq_history_w,
                    double threshold_w = 100.0, int samples = 2);

/// Per-minute compressor block over the budget horizon: released from
/// (first hour of a nonzero run - lead) to the end of that run.
std::vector<bool> schedule_block_release(const std::vector<double>& q_ref_wh,
                                         double lead_min,
                                         double nonzero_wh = 1.0);

struct HeatCtlConfig {
  PidGains gains;
  double dt_s = 60.0;
  double lead_min = 90.0;
  double defrost_threshold_w = 100.0;
  double dq_max_w = 4000.0;
  /// Reading sent while no heat is wanted; warm enough that the heat curve
  /// asks for nothing.
  double idle_t_artificial = 40.0;
};

struct HeatCtlState {
  Mode mode = Mode::Blocked;
  double e_acc_wh = 0.0;
  long hour_index = -1;
  PidState pid;
  int defrost_count = 0;
  double last_t_artificial = 40.0;
  double setpoint_w = 0.0;
  double shortfall_w = 0.0;
};

struct HeatCtlInputs {
  double dq_meas_w = 0.0;
  bool dhw_active = false;
  long hour_index = 0;        ///< absolute hour counter
  double seconds_into_hour = 0.0;
  double q_ref_hour_wh = 0.0; ///< budget of the current hour
  bool released = false;      ///< block timeline says unblocked
  double t_amb_bias_c = 0.0;  ///< ambient reading used as the PID bias
};

struct HeatCtlCommand {
  double t_artificial = 40.0;
  bool compressor_block = true;
};

struct StepOutput {
  HeatCtlCommand command;
  HeatCtlState state;
};

/// One control period. Priority: DHW, defrost, block, prestart, active.
StepOutput step(const HeatCtlInputs& in, const HeatCtlState& s,
                const HeatCtlConfig& cfg);

}  // namespace hpmpc::heatctl
