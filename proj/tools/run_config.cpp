#include "run_config.hpp"

#include "hpmpc/error.hpp"
#include "hpmpc/io.hpp"

#include <algorithm>
#include <set>

namespace hpmpc::cli {

namespace fs = std::filesystem;

namespace {

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected a JSON object");
  for (const auto& [k, v] : obj.items()) {
    if (!allowed.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
  }
}

template <typename T>
T get(const json& obj, const std::string& key, T fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + "." + key + ": wrong type (" + obj.at(key).dump() + ")");
  }
}

pricing::Hourly hourly(const json& obj, const std::string& key, const std::string& where) {
  const auto v = get<std::vector<double>>(obj, key, {}, where);
  if (v.size() != 24) {
    throw ConfigError(where + "." + key + ": needs 24 hourly values, got " +
                      std::to_string(v.size()));
  }
  pricing::Hourly h{};
  std::copy(v.begin(), v.end(), h.begin());
  return h;
}

forecasting::Perturbation perturbation_from_string(const std::string& s) {
  if (s == "cloud-bias") return forecasting::Perturbation::CloudBias;
  if (s == "temp-bias") return forecasting::Perturbation::TempBias;
  if (s == "cloud-flip") return forecasting::Perturbation::CloudFlip;
  throw ConfigError("forecast_error.kind: expected cloud-bias, temp-bias or cloud-flip, got '" +
                    s + "'");
}

const char* to_string(forecasting::Perturbation p) {
  switch (p) {
    case forecasting::Perturbation::CloudBias:
      return "cloud-bias";
    case forecasting::Perturbation::TempBias:
      return "temp-bias";
    case forecasting::Perturbation::CloudFlip:
      return "cloud-flip";
  }
  return "?";
}

fs::path existing(const fs::path& base, const std::string& rel, const std::string& key) {
  const fs::path p = (base / rel).lexically_normal();
  if (!fs::is_regular_file(p)) throw ConfigError(key + ": file '" + p.string() + "' not found");
  return p;
}

void load_generator(const json& g, RunConfig& c) {
  const std::string w = "generate";
  check_keys(g, {"days", "lookahead_days", "start", "seed", "mean_temp_c", "daily_ar",
                 "daily_sigma_c", "diurnal_amplitude_c", "peak_irradiance", "sunrise_h",
                 "sunset_h", "spot_night", "spot_day", "spot_evening", "spot_noise", "pv_peak_w"},
             w);
  auto& s = c.generator;
  s.days = get(g, "days", s.days, w);
  s.lookahead_days = get(g, "lookahead_days", s.lookahead_days, w);
  if (g.contains("start")) {
    try {
      s.start_epoch_s = scenario::parse_iso8601(get<std::string>(g, "start", "", w));
    } catch (const DataError& e) {
      throw ConfigError("generate.start: " + std::string(e.what()));
    }
  }
  c.generator_seed = get<std::uint64_t>(g, "seed", c.generator_seed, w);
  s.mean_temp_c = get(g, "mean_temp_c", s.mean_temp_c, w);
  s.daily_ar = get(g, "daily_ar", s.daily_ar, w);
  s.daily_sigma_c = get(g, "daily_sigma_c", s.daily_sigma_c, w);
  s.diurnal_amplitude_c = get(g, "diurnal_amplitude_c", s.diurnal_amplitude_c, w);
  s.peak_irradiance = get(g, "peak_irradiance", s.peak_irradiance, w);
  s.sunrise_h = get(g, "sunrise_h", s.sunrise_h, w);
  s.sunset_h = get(g, "sunset_h", s.sunset_h, w);
  s.spot_night = get(g, "spot_night", s.spot_night, w);
  s.spot_day = get(g, "spot_day", s.spot_day, w);
  s.spot_evening = get(g, "spot_evening", s.spot_evening, w);
  s.spot_noise = get(g, "spot_noise", s.spot_noise, w);
  s.pv_peak_w = get(g, "pv_peak_w", s.pv_peak_w, w);
  if (s.days < 1 || s.lookahead_days < 0) {
    throw ConfigError("generate: days must be >= 1 and lookahead_days >= 0");
  }
}

}  // namespace

json read_json(const fs::path& file) {
  const std::string text = io::read_file(file.string());
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(file.string() + ": " + e.what());
  }
}

json to_json(const building::ThermalParams& p) {
  return {{"c_room", p.c_room},   {"c_floor", p.c_floor}, {"u_room", p.u_room},
          {"u_amb", p.u_amb},     {"g_sun", p.g_sun},     {"g_sun_dir", p.g_sun_dir}};
}

building::ThermalParams thermal_params_from_json(const json& j) {
  const std::string w = "thermal params";
  check_keys(j, {"c_room", "c_floor", "u_room", "u_amb", "g_sun", "g_sun_dir"}, w);
  building::ThermalParams p;
  p.c_room = get(j, "c_room", 0.0, w);
  p.c_floor = get(j, "c_floor", 0.0, w);
  p.u_room = get(j, "u_room", 0.0, w);
  p.u_amb = get(j, "u_amb", 0.0, w);
  p.g_sun = get(j, "g_sun", 0.0, w);
  p.g_sun_dir = get(j, "g_sun_dir", 0.0, w);
  try {
    p.validate();
  } catch (const DomainError& e) {
    throw ConfigError(w + ": " + e.what());
  }
  return p;
}

json to_json(const efficiency::HpEfficiencyFit& f) {
  return {{"k", f.k},
          {"k0", f.k0},
          {"k1", f.k1},
          {"k2", f.k2},
          {"t_forward", f.t_forward},
          {"direction", efficiency::to_string(f.direction)},
          {"record", efficiency::to_record(f)}};
}

efficiency::HpEfficiencyFit hp_fit_from_json(const json& j) {
  const std::string w = "hp fit";
  check_keys(j, {"k", "k0", "k1", "k2", "t_forward", "direction", "record"}, w);
  efficiency::HpEfficiencyFit f;
  f.k = get(j, "k", 0.0, w);
  f.k0 = get(j, "k0", 0.0, w);
  f.k1 = get(j, "k1", 0.0, w);
  f.k2 = get(j, "k2", 0.0, w);
  f.t_forward = get(j, "t_forward", f.t_forward, w);
  try {
    f.direction = efficiency::direction_from_string(
        get<std::string>(j, "direction", efficiency::to_string(f.direction), w));
    f.validate();
  } catch (const Error& e) {
    throw ConfigError(w + ": " + e.what());
  }
  return f;
}

json to_json(const forecasting::PvModel& m) {
  return {{"coef", m.coef}, {"p_peak_w", m.p_peak_w}};
}

forecasting::PvModel pv_model_from_json(const json& j) {
  const std::string w = "pv model";
  check_keys(j, {"coef", "p_peak_w"}, w);
  forecasting::PvModel m;
  const auto c = get<std::vector<double>>(j, "coef", {}, w);
  if (c.size() != 3) throw ConfigError(w + ".coef: needs 3 values");
  std::copy(c.begin(), c.end(), m.coef.begin());
  m.p_peak_w = get(j, "p_peak_w", m.p_peak_w, w);
  if (!(m.p_peak_w > 0.0)) throw ConfigError(w + ".p_peak_w must be positive");
  return m;
}

RunConfig load_run_config(const fs::path& file) {
  if (!fs::is_regular_file(file)) throw ConfigError("config '" + file.string() + "' not found");
  json j;
  try {
    j = read_json(file);
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
  const std::string w = "config";
  check_keys(j, {"scenario", "generate", "controller", "days", "seed", "comfort_level",
                 "comfort", "thermal_fit", "hp_fit", "pv_fit", "mpc", "benchmark",
                 "forecast_error", "output_dir"},
             w);
  const fs::path base = file.parent_path();
  RunConfig c;
  if (j.contains("scenario") == j.contains("generate")) {
    throw ConfigError("config: give exactly one of 'scenario' (file) or 'generate' (settings)");
  }
  if (j.contains("scenario")) {
    c.scenario_ref = get<std::string>(j, "scenario", "", w);
    c.scenario_path = existing(base, c.scenario_ref, "scenario");
    c.scenario_digest = io::digest(io::read_file(c.scenario_path->string()));
  } else {
    load_generator(j.at("generate"), c);
  }

  auto& r = c.run;
  try {
    r.controller = plant::controller_from_string(
        get<std::string>(j, "controller", plant::to_string(r.controller), w));
  } catch (const Error& e) {
    throw ConfigError(std::string("controller: ") + e.what());
  }
  r.days = get(j, "days", r.days, w);
  r.seed = get<std::uint64_t>(j, "seed", r.seed, w);

  if (j.contains("comfort_level") && j.contains("comfort")) {
    throw ConfigError("config: give either 'comfort_level' or 'comfort', not both");
  }
  if (j.contains("comfort_level")) {
    const int level = get(j, "comfort_level", 4, w);
    if (level < 1 || level > 4) throw ConfigError("comfort_level must be 1, 2, 3 or 4");
    r.comfort = scenario::comfort_preset(level);
  }
  if (j.contains("comfort")) {
    const json& cf = j.at("comfort");
    check_keys(cf, {"t_ref", "c_cmf", "below", "above"}, "comfort");
    r.comfort.level = 0;
    r.comfort.t_ref = hourly(cf, "t_ref", "comfort");
    r.comfort.c_cmf = hourly(cf, "c_cmf", "comfort");
    r.comfort.below = get(cf, "below", r.comfort.below, "comfort");
    r.comfort.above = get(cf, "above", r.comfort.above, "comfort");
  }

  if (j.contains("thermal_fit")) {
    c.thermal_fit_ref = get<std::string>(j, "thermal_fit", "", w);
    c.thermal_fit = existing(base, c.thermal_fit_ref, "thermal_fit");
    r.model = thermal_params_from_json(read_json(*c.thermal_fit).value("params", json::object()));
  }
  if (j.contains("hp_fit")) {
    c.hp_fit_ref = get<std::string>(j, "hp_fit", "", w);
    c.hp_fit = existing(base, c.hp_fit_ref, "hp_fit");
    r.model_fit = hp_fit_from_json(read_json(*c.hp_fit).value("fit", json::object()));
  }
  if (j.contains("pv_fit")) {
    c.pv_fit_ref = get<std::string>(j, "pv_fit", "", w);
    c.pv_fit = existing(base, c.pv_fit_ref, "pv_fit");
    r.pv_model = pv_model_from_json(read_json(*c.pv_fit).value("model", json::object()));
  }

  if (j.contains("mpc")) {
    const json& m = j.at("mpc");
    check_keys(m, {"horizon", "mip_gap", "node_limit", "valve_price_gain"}, "mpc");
    r.horizon = get(m, "horizon", r.horizon, "mpc");
    r.mip_gap = get(m, "mip_gap", r.mip_gap, "mpc");
    r.node_limit = get(m, "node_limit", r.node_limit, "mpc");
    r.valve_price_gain = get(m, "valve_price_gain", r.valve_price_gain, "mpc");
  }
  if (j.contains("benchmark")) {
    const json& b = j.at("benchmark");
    check_keys(b, {"setpoint_c", "band_k"}, "benchmark");
    r.thermostat_setpoint_c = get(b, "setpoint_c", r.thermostat_setpoint_c, "benchmark");
    r.thermostat_band_k = get(b, "band_k", r.thermostat_band_k, "benchmark");
  }
  if (j.contains("forecast_error")) {
    const json& f = j.at("forecast_error");
    check_keys(f, {"kind", "magnitude"}, "forecast_error");
    r.perturb = true;
    r.perturbation = perturbation_from_string(get<std::string>(f, "kind", "", "forecast_error"));
    r.perturbation_magnitude = get(f, "magnitude", 0.0, "forecast_error");
  }
  c.output_dir = get<std::string>(j, "output_dir", "", w);
  r.validate();
  return c;
}

scenario::Scenario load_scenario(const RunConfig& c) {
  if (c.scenario_path) {
    return io::scenario_from_table(
        io::parse_csv(io::read_file(c.scenario_path->string()), "scenario", {}));
  }
  return scenario::generate(c.generator, c.generator_seed);
}

json RunConfig::resolved() const {
  json j;
  if (scenario_path) {
    j["scenario"] = scenario_ref;
    j["scenario_digest"] = scenario_digest;
  } else {
    const auto& g = generator;
    j["generate"] = {{"days", g.days},
                     {"lookahead_days", g.lookahead_days},
                     {"start", scenario::iso8601(g.start_epoch_s)},
                     {"seed", generator_seed},
                     {"mean_temp_c", g.mean_temp_c},
                     {"daily_ar", g.daily_ar},
                     {"daily_sigma_c", g.daily_sigma_c},
                     {"diurnal_amplitude_c", g.diurnal_amplitude_c},
                     {"peak_irradiance", g.peak_irradiance},
                     {"sunrise_h", g.sunrise_h},
                     {"sunset_h", g.sunset_h},
                     {"spot_night", g.spot_night},
                     {"spot_day", g.spot_day},
                     {"spot_evening", g.spot_evening},
                     {"spot_noise", g.spot_noise},
                     {"pv_peak_w", g.pv_peak_w}};
  }
  j["controller"] = plant::to_string(run.controller);
  j["days"] = run.days;
  j["seed"] = run.seed;
  j["comfort"] = {{"level", run.comfort.level},
                  {"t_ref", run.comfort.t_ref},
                  {"c_cmf", run.comfort.c_cmf},
                  {"below", run.comfort.below},
                  {"above", run.comfort.above}};
  j["model"] = to_json(run.model);
  j["model_fit"] = to_json(run.model_fit);
  j["pv_model"] = to_json(run.pv_model);
  if (thermal_fit) j["thermal_fit"] = thermal_fit_ref;
  if (hp_fit) j["hp_fit"] = hp_fit_ref;
  if (pv_fit) j["pv_fit"] = pv_fit_ref;
  j["mpc"] = {{"horizon", run.horizon},
              {"mip_gap", run.mip_gap},
              {"node_limit", run.node_limit},
              {"valve_price_gain", run.valve_price_gain}};
  j["benchmark"] = {{"setpoint_c", run.thermostat_setpoint_c},
                    {"band_k", run.thermostat_band_k}};
  if (run.perturb) {
    j["forecast_error"] = {{"kind", to_string(run.perturbation)},
                           {"magnitude", run.perturbation_magnitude}};
  }
  return j;
}

}  // namespace hpmpc::cli
