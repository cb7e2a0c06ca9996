#include "hpmpc/heat_controller.hpp"

#include "hpmpc/error.hpp"

#include <algorithm>
#include <cmath>

namespace hpmpc::heatctl {

const char* to_string(Mode m) {
  switch (m) {
    case Mode::Active:
      return "ACTIVE";
    case Mode::StandbyDefrost:
      return "STANDBY_DEFROST";
    case Mode::StandbyDhw:
      return "STANDBY_DHW";
    case Mode::Blocked:
      return "BLOCKED";
    case Mode::Prestart:
      return "PRESTART";
  }
  return "?";
}

PidOutput pid_step(double dq_meas_w, double dq_ref_w, const PidGains& g,
                   double dt_s, const PidState& s, double bias_c) {
  const double e = dq_ref_w - dq_meas_w;
  const double deriv = s.has_prev && dt_s > 0.0 ? (e - s.prev_error) / dt_s : 0.0;
  PidOutput out;
  out.state = s;
  out.state.prev_error = e;
  out.state.has_prev = true;

  const double trial_i = s.integral + g.ki * e * dt_s;
  const double raw = bias_c - (g.kp * e + trial_i + g.kd * deriv);
  const bool high = raw > g.out_max;
  const bool low = raw < g.out_min;
  // Positive error drives the output down. Integrate up to the point where
  // the output reaches the bound, never past it.
  const double p_part = g.kp * e + g.kd * deriv;
  if (low && e > 0.0) {
    out.state.integral = std::max(s.integral, std::min(trial_i, bias_c - p_part - g.out_min));
  } else if (high && e < 0.0) {
    out.state.integral = std::min(s.integral, std::max(trial_i, bias_c - p_part - g.out_max));
  } else {
    out.state.integral = trial_i;
  }
  const double u = bias_c - (p_part + out.state.integral);
  out.t_artificial = std::clamp(u, g.out_min, g.out_max);
  out.saturated = u <= g.out_min + 1e-12 || u >= g.out_max - 1e-12;
  return out;
}

double budget_step(double q_ref_hour_wh, double e_acc_wh, double minutes_left,
                   double dq_max_w) {
  if (!(minutes_left > 0.0) || minutes_left > 60.0) {
    throw DomainError("minutes_left must lie in (0, 60]");
  }
  const double need = (q_ref_hour_wh - e_acc_wh) / (minutes_left / 60.0);
  return std::clamp(need, 0.0, dq_max_w);
}

bool DefrostDetector::update(double dq_meas_w) {
  count_ = dq_meas_w < -threshold_w_ ? count_ + 1 : 0;
  return active();
}

bool detect_defrost(const std::vector<double>& h, double threshold_w,
                    int samples) {
  if (static_cast<int>(h.size()) < samples) return false;
  for (int i = 0; i < samples; ++i) {
    if (!(h[h.size() - 1 - i] < -threshold_w)) return false;
  }
  return true;
}

std::vector<bool> schedule_block_release(const std::vector<double>& q_ref_wh,
                                         double lead_min, double nonzero_wh) {
  if (lead_min < 0.0 || lead_min > 180.0) {
    throw DomainError("release lead must lie in [0, 180] minutes");
  }
  const int n = static_cast<int>(q_ref_wh.size());
  std::vector<bool> blocked(static_cast<std::size_t>(n) * 60, true);
  const int lead = static_cast<int>(std::lround(lead_min));
  int h = 0;
  while (h < n) {
    if (q_ref_wh[h] <= nonzero_wh) {
      ++h;
      continue;
    }
    int end = h;
    while (end < n && q_ref_wh[end] > nonzero_wh) ++end;
    const int from = std::max(0, h * 60 - lead);
    for (int m = from; m < end * 60; ++m) blocked[m] = false;
    h = end;
  }
  return blocked;
}

StepOutput step(const HeatCtlInputs& in, const HeatCtlState& s,
                const HeatCtlConfig& cfg) {
  StepOutput out;
  HeatCtlState st = s;
  if (in.hour_index != st.hour_index) {
    st.hour_index = in.hour_index;
    st.e_acc_wh = 0.0;
    st.shortfall_w = 0.0;
  }
  // Only positive flow counts toward the budget.
  st.e_acc_wh += std::max(in.dq_meas_w, 0.0) * cfg.dt_s / 3600.0;
  st.defrost_count = in.dq_meas_w < -cfg.defrost_threshold_w ? st.defrost_count + 1 : 0;
  const bool defrost = st.defrost_count >= 2;

  HeatCtlCommand cmd;
  cmd.compressor_block = !in.released;
  st.setpoint_w = 0.0;

  if (in.dhw_active) {
    st.mode = Mode::StandbyDhw;
    cmd.t_artificial = st.last_t_artificial;
  } else if (defrost) {
    st.mode = Mode::StandbyDefrost;
    cmd.t_artificial = st.last_t_artificial;
  } else if (!in.released) {
    st.mode = Mode::Blocked;
    st.pid = PidState{};
    cmd.t_artificial = cfg.idle_t_artificial;
  } else if (in.q_ref_hour_wh <= 1.0) {
    st.mode = Mode::Prestart;
    st.pid = PidState{};
    cmd.t_artificial = cfg.idle_t_artificial;
  } else {
    st.mode = Mode::Active;
    const double minutes_left =
        std::clamp((3600.0 - in.seconds_into_hour) / 60.0, 1e-3, 60.0);
    const double need = (in.q_ref_hour_wh - st.e_acc_wh) / (minutes_left / 60.0);
    st.setpoint_w = budget_step(in.q_ref_hour_wh, st.e_acc_wh, minutes_left, cfg.dq_max_w);
    st.shortfall_w = std::max(0.0, need - st.setpoint_w);
    if (st.setpoint_w <= 0.0) {
      st.pid = PidState{};
      cmd.t_artificial = cfg.idle_t_artificial;
    } else {
      const PidOutput p = pid_step(in.dq_meas_w, st.setpoint_w, cfg.gains,
                                   cfg.dt_s, st.pid, in.t_amb_bias_c);
      st.pid = p.state;
      cmd.t_artificial = p.t_artificial;
    }
    cmd.compressor_block = false;
  }
  st.last_t_artificial = cmd.t_artificial;
  out.command = cmd;
  out.state = st;
  return out;
}

}  // namespace hpmpc::heatctl
