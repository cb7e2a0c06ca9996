#include "hpmpc/plant_sim.hpp"

#include "hpmpc/error.hpp"
#include "hpmpc/state_estimation.hpp"
#include "hpmpc/supervisory_mpc.hpp"
#include "hpmpc/valve_dispatch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace hpmpc::plant {

void HpPlantConfig::validate() const {
  if (!(p_min_w > 0.0) || !(p_max_w > p_min_w)) {
    throw ConfigError("plant needs 0 < p_min < p_max");
  }
  if (steps < 2) throw ConfigError("plant needs at least two power levels");
  if (!(level_interval_s >= 0.0) || !(min_down_s >= 0.0)) {
    throw ConfigError("plant rate limit and down-time must be nonnegative");
  }
  if (!(lpf_tau_s > 0.0)) throw ConfigError("ambient filter time constant must be positive");
  if (!(t_forward_min < t_forward_max)) throw ConfigError("heat-curve clamp is empty");
  if (!(emitter_ua_w_k > 0.0)) throw ConfigError("emitter conductance must be positive");
  if (!(off_fraction <= on_fraction)) {
    throw ConfigError("plant stop threshold must not exceed the start threshold");
  }
  if (defrost_rate_per_h < 0.0 || defrost_duration_s < 0.0 || defrost_reverse_w < 0.0) {
    throw ConfigError("defrost parameters must be nonnegative");
  }
  if (!(start_delay_min_s >= 0.0) || start_delay_max_s < start_delay_min_s) {
    throw ConfigError("start-delay range is invalid");
  }
  for (double m : dhw_minutes) {
    if (m < 0.0 || m >= 1440.0) throw ConfigError("DHW event time must lie within the day");
  }
  if (dhw_jitter_min < 0.0 || dhw_duration_s < 0.0) {
    throw ConfigError("DHW jitter and duration must be nonnegative");
  }
  if (!(efficiency_scale > 0.0)) throw ConfigError("plant efficiency scale must be positive");
  if (fit.direction != efficiency::Direction::HeatFromPower) {
    throw ConfigError("plant efficiency fit must map power to heat");
  }
}

std::vector<double> HpPlantConfig::power_levels() const {
  std::vector<double> out(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    out[i] = p_min_w + (p_max_w - p_min_w) * i / (steps - 1);
  }
  return out;
}

double HpPlantConfig::heat_w(double p_w, double t_amb_c) const {
  if (p_w <= 0.0) return 0.0;
  return efficiency_scale * efficiency::heat_from_power(p_w, t_amb_c, fit);
}

double lpf_ambient(double t_in, double state, double tau_s, double dt_s) {
  if (!(tau_s > 0.0)) throw DomainError("filter time constant must be positive");
  return state + (1.0 - std::exp(-dt_s / tau_s)) * (t_in - state);
}

double heat_curve(double t_filtered, const HpPlantConfig& cfg) {
  return std::clamp(cfg.curve_a - cfg.curve_b * t_filtered, cfg.t_forward_min,
                    cfg.t_forward_max);
}

std::string events_to_string(unsigned e) {
  static constexpr std::pair<unsigned, const char*> kNames[] = {
      {kEventDefrost, "defrost"}, {kEventDhw, "dhw"},   {kEventRod, "rod"},
      {kEventStart, "start"},     {kEventStop, "stop"}, {kEventCutout, "cutout"}};
  std::string out;
  for (const auto& [bit, name] : kNames) {
    if (e & bit) {
      if (!out.empty()) out += '|';
      out += name;
    }
  }
  return out;
}

namespace {

// Electric power whose plant-side heat output equals `q_w`, clamped to range.
double power_for_heat(double q_w, double t_amb, const HpPlantConfig& cfg) {
  double lo = cfg.p_min_w;
  double hi = cfg.p_max_w;
  if (cfg.heat_w(lo, t_amb) >= q_w) return lo;
  if (cfg.heat_w(hi, t_amb) <= q_w) return hi;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    (cfg.heat_w(mid, t_amb) < q_w ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

HpStepResult hp_step(const heatctl::HeatCtlCommand& cmd, const HpConditions& c,
                     HpState& s, const HpPlantConfig& cfg, double dt_s,
                     std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  HpStepResult r;
  s.t_filtered = lpf_ambient(cmd.t_artificial, s.t_filtered, cfg.lpf_tau_s, dt_s);
  r.t_forward = heat_curve(s.t_filtered, cfg);
  r.demand_w = std::max(
      0.0, cfg.emitter_ua_w_k * c.flow_fraction * (r.t_forward - c.t_return));

  // A release arms the start delay; the compressor may not start before it.
  if (cmd.compressor_block) {
    s.blocked = true;
  } else if (s.blocked) {
    s.blocked = false;
    s.armed_at_s = c.time_s + cfg.start_delay_min_s +
                   unif(rng) * (cfg.start_delay_max_s - cfg.start_delay_min_s);
  }
  const double draw = unif(rng);

  auto stop = [&] {
    if (s.on) {
      s.on = false;
      s.off_since_s = c.time_s;
      r.events |= kEventStop;
    }
  };

  if (c.dhw_active) {
    r.events |= kEventDhw;
    if (s.blocked) {
      stop();
      r.p_dhw_w = cfg.rod_w;
      r.events |= kEventRod;
    } else {
      r.p_dhw_w = cfg.dhw_compressor_w;
    }
    s.defrost_until_s = -std::numeric_limits<double>::infinity();
    return r;
  }
  if (s.blocked) {
    stop();
    return r;
  }
  const std::vector<double> levels = cfg.power_levels();
  if (s.on && c.time_s < s.defrost_until_s) {
    r.p_w = levels[s.level];
    r.dq_w = -cfg.defrost_reverse_w;
    r.events |= kEventDefrost;
    return r;
  }
  if (s.on && cfg.low_flow_cutout > 0.0 && c.flow_fraction < cfg.low_flow_cutout) {
    stop();
    r.events |= kEventCutout;
    return r;
  }

  const double q_low = cfg.heat_w(cfg.p_min_w, c.t_amb_true);
  if (s.on && r.demand_w < cfg.off_fraction * q_low) {
    stop();
  } else if (!s.on && c.time_s >= s.armed_at_s &&
             c.time_s - s.off_since_s >= cfg.min_down_s &&
             r.demand_w >= cfg.on_fraction * q_low) {
    s.on = true;
    s.level = 0;
    s.last_level_change_s = c.time_s;
    r.events |= kEventStart;
  }
  if (!s.on) return r;

  const double want = power_for_heat(r.demand_w, c.t_amb_true, cfg);
  const double spacing = (cfg.p_max_w - cfg.p_min_w) / (cfg.steps - 1);
  const int target = std::clamp(
      static_cast<int>(std::lround((want - cfg.p_min_w) / spacing)), 0, cfg.steps - 1);
  if (target != s.level &&
      c.time_s - s.last_level_change_s >= cfg.level_interval_s - 1e-9) {
    s.level += target > s.level ? 1 : -1;
    s.last_level_change_s = c.time_s;
  }
  r.p_w = levels[s.level];
  r.dq_w = cfg.heat_w(r.p_w, c.t_amb_true);

  if (c.t_amb_true < cfg.defrost_below_c && cfg.defrost_rate_per_h > 0.0 &&
      draw < 1.0 - std::exp(-cfg.defrost_rate_per_h * dt_s / 3600.0)) {
    s.defrost_until_s = c.time_s + cfg.defrost_duration_s;
    r.dq_w = -cfg.defrost_reverse_w;
    r.events |= kEventDefrost;
  }
  return r;
}

building::Vec2 house_step(const building::ContinuousStateSpace& ss,
                          const building::Vec2& x, double dq_w,
                          const building::Disturbance& d, double dt_s) {
  const building::Vec2 u = ss.b * dq_w + ss.e * d.vec();
  auto f = [&](const building::Vec2& y) -> building::Vec2 { return ss.a * y + u; };
  const building::Vec2 k1 = f(x);
  const building::Vec2 k2 = f(x + 0.5 * dt_s * k1);
  const building::Vec2 k3 = f(x + 0.5 * dt_s * k2);
  const building::Vec2 k4 = f(x + dt_s * k3);
  return x + dt_s / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

building::Vec2 house_step(const building::ThermalParams& p,
                          const building::Vec2& x, double dq_w,
                          const building::Disturbance& d, double dt_s) {
  return house_step(building::assemble_state_space(p), x, dq_w, d, dt_s);
}

building::ThermalParams reference_house() {
  return {3.5e6, 92e6, 2300.0, 80.0, 2.5, 1.0};
}

const char* to_string(Controller c) {
  return c == Controller::Mpc ? "mpc" : "benchmark";
}

Controller controller_from_string(const std::string& s) {
  if (s == "mpc") return Controller::Mpc;
  if (s == "benchmark") return Controller::Benchmark;
  throw ConfigError("unknown controller '" + s + "' (expected mpc or benchmark)");
}

void RunOptions::validate() const {
  plant.validate();
  house.validate();
  model.validate();
  model_fit.validate();
  if (days < 0) throw ConfigError("run days must be nonnegative");
  if (horizon < 2) throw ConfigError("MPC horizon must be at least 2 hours");
  if (sensor_sigma_k < 0.0) throw ConfigError("sensor noise must be nonnegative");
  if (appliance_w < 0.0) throw ConfigError("appliance load must be nonnegative");
  if (!(offset_tau_s > 0.0)) throw ConfigError("room offset time constant must be positive");
  if (thermostat_band_k < 0.0) throw ConfigError("thermostat band must be nonnegative");
  if (!room_areas.empty() && room_areas.size() > 15) {
    throw ConfigError("at most 15 heating circuits are supported");
  }
  for (double a : room_areas) {
    if (!(a > 0.0)) throw ConfigError("room areas must be positive");
  }
}

namespace {

struct DhwWindow {
  double from = 0.0;
  double to = 0.0;
};

std::vector<DhwWindow> draw_dhw(const HpPlantConfig& cfg, std::int64_t start,
                                int days, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> jitter(-cfg.dhw_jitter_min, cfg.dhw_jitter_min);
  std::vector<DhwWindow> out;
  for (int d = 0; d < days; ++d) {
    for (double m : cfg.dhw_minutes) {
      const double t0 = static_cast<double>(start) + 86400.0 * d + 60.0 * std::round(m + jitter(rng));
      out.push_back({t0, t0 + cfg.dhw_duration_s});
    }
  }
  return out;
}

bool in_window(const std::vector<DhwWindow>& w, double t) {
  return std::any_of(w.begin(), w.end(),
                     [t](const DhwWindow& x) { return t >= x.from && t < x.to; });
}

valves::FlowModel flow_for(const std::vector<double>& areas) {
  valves::FlowModel fm = valves::default_flow_model();
  if (areas.empty()) return fm;
  const double total = std::accumulate(areas.begin(), areas.end(), 0.0);
  const double sum_nominal =
      std::accumulate(fm.q_nominal.begin(), fm.q_nominal.end(), 0.0);
  fm.q_nominal.clear();
  for (double a : areas) fm.q_nominal.push_back(sum_nominal * a / total);
  return fm;
}

std::uint32_t valve_bits(const std::vector<int>& v) {
  std::uint32_t b = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i]) b |= 1u << i;
  }
  return b;
}

// Everything the MPC layers remember between calls.
struct MpcMemory {
  std::vector<double> budget_wh;   // from the current hour onward
  std::vector<bool> blocked;       // per minute from the current hour onward
  std::vector<int> delta;
  bool slack_binding = false;
};

}  // namespace

SimTrace run_closed_loop(const scenario::Scenario& sc, const RunOptions& o) {
  sc.validate();
  o.validate();
  const bool mpc = o.controller == Controller::Mpc;
  const int days = o.days > 0 ? o.days : sc.days;
  if (days > sc.days) {
    throw DataError("scenario covers " + std::to_string(sc.days) +
                    " days, run asks for " + std::to_string(days));
  }
  const int hours = days * 24;
  if (mpc && hours + o.horizon > sc.hours()) {
    throw DataError("scenario lookahead is shorter than the MPC horizon");
  }

  std::mt19937_64 plant_rng(o.seed);
  std::mt19937_64 sensor_rng(o.seed ^ 0x5eed5eedULL);
  std::mt19937_64 dhw_rng(o.seed + 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> sensor(0.0, 1.0);

  const std::vector<double> buy = sc.buy();
  const std::vector<double> sell = sc.sell();
  const forecasting::WeatherSeries forecast =
      o.perturb ? forecasting::perturb_forecast(sc.weather, o.perturbation,
                                                o.perturbation_magnitude, o.seed + 1)
                : sc.weather;

  const building::ContinuousStateSpace plant_ss = building::assemble_state_space(o.house);
  const building::ContinuousStateSpace model_ss = building::assemble_state_space(o.model);
  const building::DiscreteStateSpace model_hour = building::discretize(model_ss, 3600.0);
  const building::DiscreteStateSpace model_kf =
      building::discretize(model_ss, estimation::kFilterPeriodS);
  estimation::NoiseConfig noise;
  noise.r_meas = std::max(o.sensor_sigma_k * o.sensor_sigma_k, 1e-6);

  const std::vector<double> areas =
      o.room_areas.empty() ? valves::default_room_areas() : o.room_areas;
  const valves::FlowModel flow = flow_for(o.room_areas);
  const int rooms = static_cast<int>(areas.size());
  const double area_sum = std::accumulate(areas.begin(), areas.end(), 0.0);
  const std::vector<int> all_open(rooms, 1);
  const double q_full = valves::flow_from_config(all_open, flow);
  std::vector<int> v = all_open;
  double flow_fraction = 1.0;
  std::vector<double> offsets(rooms, 0.0);

  // Start in equilibrium with the first day's mean ambient temperature.
  double t_amb0 = 0.0;
  for (int h = 0; h < 24; ++h) t_amb0 += sc.weather[h].t_amb / 24.0;
  building::Vec2 x(o.initial_room_c,
                   o.initial_room_c +
                       o.house.u_amb / o.house.u_room * (o.initial_room_c - t_amb0));

  HpState hs;
  if (mpc) {
    hs.t_filtered = o.heat_ctl.idle_t_artificial;
  } else {
    hs.t_filtered = sc.weather[0].t_amb;
    hs.blocked = false;
    hs.armed_at_s = -std::numeric_limits<double>::infinity();
  }
  const std::vector<DhwWindow> dhw = draw_dhw(o.plant, sc.start_epoch_s, days, dhw_rng);

  estimation::KalmanState kf;
  kf.x = x;
  kf.p = (building::Mat2() << 0.01, 0.0, 0.0, 1.0).finished();
  heatctl::HeatCtlState hc;
  MpcMemory mem;
  double dq_last_minute = 0.0;
  double dq_kf_sum = 0.0;
  double p_prev_kw = 0.0;
  int off_hours = 1000;

  SimTrace trace;
  trace.controller = o.controller;
  trace.seed = o.seed;
  trace.start_epoch_s = sc.start_epoch_s;
  trace.days = days;
  trace.steps.reserve(static_cast<std::size_t>(hours) * 60);
  trace.hours.reserve(hours);

  auto measure = [&] { return x[0] + o.sensor_sigma_k * sensor(sensor_rng); };

  for (int h = 0; h < hours; ++h) {
    const double t_hour = static_cast<double>(sc.start_epoch_s) + 3600.0 * h;
    const forecasting::WeatherPoint& w = sc.weather[h];
    const building::Disturbance dist = building::make_disturbance(w.t_amb, w.i_dir, w.cloud);
    const int hod = h % 24;
    HourRecord hr;
    hr.time_s = t_hour;
    hr.buy = buy[h];
    hr.sell = sell[h];

    if (mpc) {
      mpc::MiocpSpec spec;
      spec.horizon = o.horizon;
      spec.model = model_hour;
      spec.fit = o.model_fit;
      spec.p_min_kw = o.plant.p_min_w / 1000.0;
      spec.p_max_kw = o.plant.p_max_w / 1000.0;
      for (int k = 0; k < o.horizon; ++k) {
        const int i = h + k;
        const int end_hod = (i + 1) % 24;
        spec.buy.push_back(buy[i]);
        spec.sell.push_back(sell[i]);
        spec.p_app_kw.push_back(o.appliance_w / 1000.0);
        spec.p_pv_kw.push_back(forecasting::predict_pv(o.pv_model, forecast[i]) / 1000.0);
        spec.disturbance.push_back(building::make_disturbance(
            forecast[i].t_amb, forecast[i].i_dir, forecast[i].cloud));
        spec.t_ref.push_back(o.comfort.t_ref[end_hod]);
        spec.c_cmf.push_back(o.comfort.c_cmf[end_hod]);
        spec.t_min.push_back(o.comfort.t_ref[end_hod] - o.comfort.below);
        spec.t_max.push_back(o.comfort.t_ref[end_hod] + o.comfort.above);
      }
      spec.delta_prev = off_hours == 0 ? 1 : 0;
      spec.p_prev_kw = spec.delta_prev ? std::min(p_prev_kw, spec.p_max_kw) : 0.0;
      spec.off_steps = off_hours;

      mpc::SolveOptions so;
      so.relative_gap = o.mip_gap;
      so.node_limit = o.node_limit;
      if (!mem.delta.empty()) {
        so.hint.assign(mem.delta.begin() + 1, mem.delta.end());
        so.hint.push_back(0);
      }
      bool ok = false;
      try {
        const mpc::MiocpProblem prob = mpc::build_miocp(spec, kf.x, hod);
        const mpc::MiocpSolution sol = mpc::solve_branch_and_bound(prob, so);
        trace.mip_nodes += sol.nodes;
        if (sol.status != mpc::SolveStatus::Infeasible) {
          mem.budget_wh = mpc::heat_budget(sol);
          mem.delta = sol.delta;
          mem.slack_binding = mpc::validate_solution(spec, kf.x, sol).slack_binding;
          ok = true;
        }
      } catch (const Error&) {
        ok = false;
      }
      if (!ok) {
        // Keep executing the previous plan.
        ++trace.solve_failures;
        if (!mem.budget_wh.empty()) {
          mem.budget_wh.erase(mem.budget_wh.begin());
          mem.budget_wh.push_back(0.0);
          mem.delta.erase(mem.delta.begin());
          mem.delta.push_back(0);
        } else {
          mem.budget_wh.assign(o.horizon, 0.0);
          mem.delta.assign(o.horizon, 0);
        }
      }
      mem.blocked = heatctl::schedule_block_release(mem.budget_wh, o.heat_ctl.lead_min);
      hr.q_budget = mem.budget_wh[0] / 1000.0;
      hr.slack_binding = mem.slack_binding;
    }

    double t_room_sum = 0.0;
    for (int m = 0; m < 60; ++m) {
      const double t_min = t_hour + 60.0 * m;
      const double y = measure();
      heatctl::HeatCtlCommand cmd;
      std::string mode;
      if (mpc) {
        if (m % 15 == 0) {
          std::vector<double> temps(rooms);
          std::vector<double> refs(rooms, o.comfort.t_ref[hod]);
          for (int j = 0; j < rooms; ++j) temps[j] = y + offsets[j];
          valves::ValveProblem vp;
          vp.q_ref = mem.budget_wh[0] > 1.0 ? q_full : flow.q_min;
          vp.prices = valves::comfort_prices(temps, refs, o.valve_price_gain);
          vp.flow = flow;
          vp.v_prev = v;
          const valves::ValveDecision dec = valves::select_valves(vp);
          v = dec.v;
          flow_fraction = dec.flow / q_full;
        }
        heatctl::HeatCtlInputs in;
        in.dq_meas_w = dq_last_minute;
        in.dhw_active = in_window(dhw, t_min);
        in.hour_index = h;
        in.seconds_into_hour = 60.0 * m;
        in.q_ref_hour_wh = mem.budget_wh[0];
        in.released = !mem.blocked[m];
        in.t_amb_bias_c = w.t_amb;
        const heatctl::StepOutput so = heatctl::step(in, hc, o.heat_ctl);
        hc = so.state;
        cmd = so.command;
        mode = heatctl::to_string(hc.mode);
      } else {
        if (m % 15 == 0) {
          // Room thermostats with staggered switch points across the band,
          // so the open area tracks the room error proportionally.
          flow_fraction = 0.0;
          for (int j = 0; j < rooms; ++j) {
            const double err = o.thermostat_setpoint_c - (y + offsets[j]);
            const double on_at =
                o.thermostat_band_k * (2.0 * (j + 0.5) / rooms - 1.0);
            v[j] = err > on_at ? 1 : 0;
            flow_fraction += v[j] * areas[j] / area_sum;
          }
        }
        cmd.t_artificial = w.t_amb;
        cmd.compressor_block = false;
        mode = flow_fraction > 0.0 ? "thermostat-on" : "thermostat-off";
      }

      StepRecord rec;
      rec.time_s = t_min;
      rec.t_amb = w.t_amb;
      rec.t_artificial = cmd.t_artificial;
      rec.mode = mode;
      rec.valves = valve_bits(v);
      rec.buy = buy[h];
      rec.sell = sell[h];
      double v_mean = 0.0;
      for (int j = 0; j < rooms; ++j) v_mean += v[j] * areas[j] / area_sum;
      constexpr int kSub = 6;
      constexpr double kDt = 10.0;
      const double decay = 1.0 - std::exp(-kDt / o.offset_tau_s);
      for (int sub = 0; sub < kSub; ++sub) {
        HpConditions cond;
        cond.t_amb_true = w.t_amb;
        cond.t_return = x[1];
        cond.flow_fraction = flow_fraction;
        cond.time_s = t_min + kDt * sub;
        cond.dhw_active = in_window(dhw, cond.time_s);
        const HpStepResult r = hp_step(cmd, cond, hs, o.plant, kDt, plant_rng);
        x = house_step(plant_ss, x, r.dq_w, dist, kDt);
        for (int j = 0; j < rooms; ++j) {
          offsets[j] += decay * (o.offset_gain_k * (v[j] - v_mean) - offsets[j]);
        }
        rec.dq_w += r.dq_w / kSub;
        rec.p_hp_w += r.p_w / kSub;
        rec.p_dhw_w += r.p_dhw_w / kSub;
        rec.events |= r.events;
        hr.e_hp += r.p_w * kDt / 3.6e6;
        hr.e_dhw += r.p_dhw_w * kDt / 3.6e6;
        hr.q_heat += r.dq_w * kDt / 3.6e6;
      }
      rec.t_room = x[0];
      rec.t_floor = x[1];
      t_room_sum += x[0];
      dq_last_minute = rec.dq_w;
      dq_kf_sum += rec.dq_w;
      if (m % 5 == 4) {
        kf = estimation::kf_predict(kf, dq_kf_sum / 5.0, dist, model_kf, noise);
        kf = estimation::kf_update(kf, measure(), noise);
        dq_kf_sum = 0.0;
      }
      trace.steps.push_back(std::move(rec));
    }

    hr.e_pv = sc.pv_w[h] / 1000.0;
    hr.e_app = o.appliance_w / 1000.0;
    const double net = hr.e_hp + hr.e_dhw + hr.e_app - hr.e_pv;
    hr.e_import = std::max(net, 0.0);
    hr.e_export = std::max(-net, 0.0);
    hr.t_room = t_room_sum / 60.0;
    hr.t_amb = w.t_amb;
    trace.hours.push_back(hr);

    if (hr.e_hp > 0.01) {
      off_hours = 0;
      p_prev_kw = hr.e_hp;
    } else {
      off_hours = std::min(off_hours + 1, 1000);
      p_prev_kw = 0.0;
    }
  }
  return trace;
}

SimTrace run_benchmark_controller(const scenario::Scenario& sc,
                                  const RunOptions& opts) {
  RunOptions o = opts;
  o.controller = Controller::Benchmark;
  return run_closed_loop(sc, o);
}

}  // namespace hpmpc::plant
