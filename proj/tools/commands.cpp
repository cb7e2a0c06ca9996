#include "commands.hpp"

#include "hpmpc/building_model.hpp"
#include "hpmpc/error.hpp"
#include "hpmpc/forecasting.hpp"
#include "hpmpc/hp_efficiency.hpp"
#include "hpmpc/io.hpp"
#include "hpmpc/plant_sim.hpp"
#include "hpmpc/scenario.hpp"
#include "run_config.hpp"

#include <cmath>
#include <cstdio>
#include <random>

namespace hpmpc::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kDefaultOutput = "hpmpc-out";

// Writes a file and remembers its digest for the run metadata.
struct Writer {
  fs::path dir;
  json files = json::object();

  void put(const std::string& name, const std::string& text) {
    fs::create_directories(dir);
    io::write_file((dir / name).string(), text);
    files[name] = io::digest(text);
  }
  void put_json(const std::string& name, json j) {
    j["files"] = files;
    put(name, j.dump(2) + "\n");
  }
};

io::CsvMeta meta_for(const std::string& config_digest, std::uint64_t seed) {
  io::CsvMeta m;
  m.digest = config_digest;
  m.seed = seed;
  return m;
}

io::CsvTable table(const std::string& schema, io::CsvMeta meta,
                   std::vector<std::string> header) {
  io::CsvTable t;
  t.meta = std::move(meta);
  t.meta.schema = schema;
  t.header = std::move(header);
  return t;
}

std::string iso(double t) { return scenario::iso8601(static_cast<std::int64_t>(t)); }

// A trace may be given as its directory or as the trace-hours file itself.
std::vector<evaluation::DayRecord> load_days(const fs::path& p) {
  const fs::path file = fs::is_directory(p) ? p / "trace-hours.csv" : p;
  if (!fs::is_regular_file(file)) {
    throw ConfigError("trace '" + file.string() + "' not found");
  }
  const io::CsvTable t = io::parse_csv(io::read_file(file.string()), "trace-hours", {});
  const auto days = evaluation::day_records(io::trace_from_hours(t));
  if (days.empty()) throw DataError(file.string() + ": no complete day");
  return days;
}

std::vector<evaluation::DayRecord> load_bench(const CompareArgs& a) {
  if (a.bench.empty()) throw ConfigError("at least one --bench trace is required");
  std::vector<evaluation::DayRecord> out;
  for (const auto& b : a.bench) {
    const auto d = load_days(b);
    out.insert(out.end(), d.begin(), d.end());
  }
  return out;
}

json compare_echo(const CompareArgs& a) {
  json bench = json::array();
  for (const auto& b : a.bench) bench.push_back(b.generic_string());
  return {{"exp", a.exp.generic_string()},
          {"bench", bench},
          {"bounds",
           {{"t_dn", a.bounds.t_dn},
            {"t_up", a.bounds.t_up},
            {"pv_dn", a.bounds.pv_dn},
            {"pv_up", a.bounds.pv_up}}}};
}

double r_squared(const std::vector<double>& y, const std::vector<double>& f) {
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  double ss_res = 0.0;
  double ss_tot = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    ss_res += (y[i] - f[i]) * (y[i] - f[i]);
    ss_tot += (y[i] - mean) * (y[i] - mean);
  }
  return ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 0.0;
}

// ---------------------------------------------------------------------------
// fit

void fit_house(const FitArgs& a, const std::string& text, Writer& w, json& report) {
  const io::CsvTable t = io::parse_csv(text, "thermal-samples", {});
  const auto series = io::thermal_samples_from_table(t);
  const building::FitReport r = building::fit_thermal_params(series);
  report["params"] = to_json(r.params);
  report["initial_guess"] = to_json(r.initial_guess);
  report["segments"] = r.segments;
  report["interpolated_samples"] = r.interpolated_samples;
  report["iterations"] = r.iterations;
  report["final_cost"] = r.final_cost;
  report["notes"] = r.notes;
  json rm = json::array();
  io::CsvTable out = table("fit-house-rmse", meta_for(report["config_digest"].get<std::string>(), a.seed),
                           {"steps", "minutes", "rmse_k"});
  for (const auto& h : r.rmse) {
    rm.push_back({{"steps", h.steps}, {"rmse_k", h.rmse_k}});
    out.rows.push_back({std::to_string(h.steps), std::to_string(h.steps * 5), io::fmt(h.rmse_k)});
  }
  report["rmse"] = rm;
  w.put("fit-house-rmse.csv", io::to_csv(out));
  std::printf("house fit: %d segment(s), %d interpolated sample(s)\n", r.segments,
              r.interpolated_samples);
  for (const auto& h : r.rmse) {
    std::printf("  %3d-step RMSE %.4f K\n", h.steps, h.rmse_k);
  }
}

void fit_hp(const FitArgs& a, const std::string& text, Writer& w, json& report) {
  const io::CsvTable t = io::parse_csv(text, "hp-samples", {});
  const auto samples = io::operating_samples_from_table(t);
  efficiency::EfficiencyFitOptions o;
  o.robust = a.robust;
  o.seed = a.seed;
  const auto dir = a.direction == "power-from-heat" ? efficiency::Direction::PowerFromHeat
                                                     : efficiency::Direction::HeatFromPower;
  const efficiency::EfficiencyFitReport r = efficiency::fit_efficiency(samples, dir, o);
  report["fit"] = to_json(r.fit);
  report["r2"] = r.r2;
  report["samples_used"] = r.samples_used;
  report["inliers"] = r.inliers;
  report["carnot_violations"] = r.carnot_violations;
  report["notes"] = r.notes;

  io::CsvTable out = table("fit-hp-residuals", meta_for(report["config_digest"].get<std::string>(), a.seed),
                           {"timestamp", "t_amb", "p_w", "q_w", "predicted", "residual"});
  for (const auto& s : samples) {
    if (!(s.p_w > 0.0 && s.q_w > 0.0)) continue;
    const bool heat = dir == efficiency::Direction::HeatFromPower;
    const double pred = heat ? efficiency::heat_from_power(s.p_w, s.t_amb_c, r.fit)
                             : efficiency::power_from_heat(s.q_w, s.t_amb_c, r.fit);
    const double meas = heat ? s.q_w : s.p_w;
    out.rows.push_back({iso(s.time_s), io::fmt(s.t_amb_c), io::fmt(s.p_w), io::fmt(s.q_w),
                        io::fmt(pred), io::fmt(meas - pred)});
  }
  w.put("fit-hp-residuals.csv", io::to_csv(out));
  std::printf("hp fit (%s): R^2 %.4f on %zu samples, T_F %.1f C\n", a.direction.c_str(), r.r2,
              r.samples_used, r.fit.t_forward);
}

void fit_pv(const FitArgs& a, const std::string& text, Writer& w, json& report) {
  const io::CsvTable t = io::parse_csv(text, "pv-history", {});
  forecasting::WeatherSeries weather;
  std::vector<double> pv;
  io::pv_history_from_table(t, weather, pv);
  const forecasting::PvModel m = forecasting::fit_pv_model(weather, pv, a.pv_peak_w);
  const std::vector<double> pred = forecasting::predict_pv(m, weather);
  std::vector<double> y;
  std::vector<double> f;
  io::CsvTable out = table("fit-pv-residuals", meta_for(report["config_digest"].get<std::string>(), a.seed),
                           {"timestamp", "i_dir", "cloud", "pv_w", "predicted", "residual"});
  for (std::size_t i = 0; i < weather.size(); ++i) {
    if (!(weather[i].i_dir > 0.0)) continue;
    y.push_back(pv[i]);
    f.push_back(pred[i]);
    out.rows.push_back({iso(weather[i].time_s), io::fmt(weather[i].i_dir),
                        io::fmt(weather[i].cloud), io::fmt(pv[i]), io::fmt(pred[i]),
                        io::fmt(pv[i] - pred[i])});
  }
  const double r2 = r_squared(y, f);
  report["model"] = to_json(m);
  report["r2"] = r2;
  report["daylight_samples"] = y.size();
  w.put("fit-pv-residuals.csv", io::to_csv(out));
  std::printf("pv fit: R^2 %.4f on %zu daylight samples\n", r2, y.size());
}

}  // namespace

void cmd_fit(const FitArgs& a, const fs::path& out) {
  if (a.kind != "house" && a.kind != "hp" && a.kind != "pv") {
    throw ConfigError("unknown fit kind '" + a.kind + "' (expected house, hp or pv)");
  }
  if (a.direction != "heat-from-power" && a.direction != "power-from-heat") {
    throw ConfigError("--direction must be heat-from-power or power-from-heat");
  }
  if (!fs::is_regular_file(a.data)) throw ConfigError("data file '" + a.data.string() + "' not found");
  const std::string text = io::read_file(a.data.string());
  json cfg = {{"kind", a.kind},
              {"data", a.data.generic_string()},
              {"data_digest", io::digest(text)},
              {"seed", a.seed}};
  if (a.kind == "hp") {
    cfg["direction"] = a.direction;
    cfg["robust"] = a.robust;
  }
  if (a.kind == "pv") cfg["p_peak_w"] = a.pv_peak_w;
  json report = {{"config", cfg}, {"config_digest", io::digest(cfg.dump())}, {"seed", a.seed}};
  Writer w{out};
  if (a.kind == "house") fit_house(a, text, w, report);
  if (a.kind == "hp") fit_hp(a, text, w, report);
  if (a.kind == "pv") fit_pv(a, text, w, report);
  w.put_json("fit-" + a.kind + ".json", report);
}

// ---------------------------------------------------------------------------
// generate

void cmd_generate(const GenerateArgs& a, const fs::path& out) {
  if (a.days < 1) throw ConfigError("--days must be at least 1");
  scenario::GeneratorConfig g;
  g.days = a.days;
  g.mean_temp_c = a.mean_temp_c;
  const json cfg = {{"kind", a.kind}, {"days", a.days}, {"seed", a.seed},
                    {"mean_temp_c", a.mean_temp_c}};
  const std::string cd = io::digest(cfg.dump());
  const io::CsvMeta meta = meta_for(cd, a.seed);
  Writer w{out};

  if (a.kind == "scenario") {
    w.put("scenario.csv", io::to_csv(io::scenario_table(scenario::generate(g, a.seed), meta)));
  } else if (a.kind == "pv-history") {
    const scenario::Scenario sc = scenario::generate(g, a.seed);
    io::CsvTable t = table("pv-history", meta, {"timestamp", "t_amb", "i_dir", "cloud", "pv_w"});
    for (int h = 0; h < 24 * sc.days; ++h) {
      const auto& p = sc.weather[h];
      t.rows.push_back({iso(p.time_s), io::fmt(p.t_amb), io::fmt(p.i_dir), io::fmt(p.cloud),
                        io::fmt(sc.pv_w[h])});
    }
    w.put("pv-history.csv", io::to_csv(t));
  } else if (a.kind == "hp-samples") {
    // Operating points of the plant unit with sensor noise and idle rows.
    const plant::HpPlantConfig plant;
    std::mt19937_64 rng(a.seed);
    std::uniform_real_distribution<double> ta(a.mean_temp_c - 12.0, a.mean_temp_c + 8.0);
    std::uniform_int_distribution<int> level(0, plant.steps - 1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> noise(0.0, 15.0);
    const auto levels = plant.power_levels();
    io::CsvTable t = table("hp-samples", meta, {"timestamp", "p_w", "q_w", "t_amb"});
    for (int i = 0; i < 24 * a.days; ++i) {
      const double t_amb = ta(rng);
      double p = 0.0;
      double q = 0.0;
      if (u(rng) > 0.1) {
        p = levels[level(rng)];
        q = plant.heat_w(p, t_amb) + noise(rng);
      }
      t.rows.push_back({iso(static_cast<double>(g.start_epoch_s) + 3600.0 * i), io::fmt(p),
                        io::fmt(q), io::fmt(t_amb)});
    }
    w.put("hp-samples.csv", io::to_csv(t));
  } else if (a.kind == "house-samples") {
    // Five-minute means from a benchmark run, with a few sensor dropouts.
    const scenario::Scenario sc = scenario::generate(g, a.seed);
    plant::RunOptions o;
    o.controller = plant::Controller::Benchmark;
    o.seed = a.seed;
    const plant::SimTrace tr = plant::run_closed_loop(sc, o);
    std::mt19937_64 rng(a.seed + 1);
    std::normal_distribution<double> noise(0.0, 0.05);
    io::CsvTable t = table("thermal-samples", meta,
                           {"timestamp", "t_room", "q_hp_w", "t_amb", "i_dir", "cloud"});
    const std::size_t n = tr.steps.size() / 5;
    for (std::size_t k = 0; k < n; ++k) {
      double dq = 0.0;
      for (int s = 0; s < 5; ++s) dq += tr.steps[5 * k + s].dq_w / 5.0;
      const auto& last = tr.steps[5 * k + 4];
      const auto& wp = sc.weather[static_cast<std::size_t>(k / 12)];
      const std::size_t day_pos = k % 288;
      // A two-hour outage every third day and a single lost sample each day.
      const bool outage = (k / 288) % 3 == 1 && day_pos >= 120 && day_pos < 144;
      const bool blip = day_pos == 200;
      const double reading = last.t_room + noise(rng);
      t.rows.push_back({iso(last.time_s - 240.0), outage || blip ? "" : io::fmt(reading),
                        io::fmt(dq), io::fmt(last.t_amb), io::fmt(wp.i_dir), io::fmt(wp.cloud)});
    }
    w.put("house-samples.csv", io::to_csv(t));
  } else {
    throw ConfigError("unknown generate kind '" + a.kind +
                      "' (expected scenario, hp-samples, house-samples or pv-history)");
  }
  w.put_json("generate-" + a.kind + ".json", {{"config", cfg}, {"config_digest", cd}, {"seed", a.seed}});
  std::printf("generated %s (%d days, seed %llu) in %s\n", a.kind.c_str(), a.days,
              static_cast<unsigned long long>(a.seed), out.string().c_str());
}

// ---------------------------------------------------------------------------
// simulate

void cmd_simulate(const fs::path& config, const fs::path& out_override) {
  const RunConfig c = load_run_config(config);
  const fs::path out = !out_override.empty()    ? out_override
                       : !c.output_dir.empty() ? fs::path(c.output_dir)
                                               : fs::path(kDefaultOutput);
  const scenario::Scenario sc = load_scenario(c);
  const json resolved = c.resolved();
  const std::string cd = io::digest(resolved.dump());

  const plant::SimTrace tr = plant::run_closed_loop(sc, c.run);
  const auto days = evaluation::day_records(tr);
  const io::CsvMeta meta = meta_for(cd, c.run.seed);

  Writer w{out};
  w.put("trace-steps.csv", io::to_csv(io::trace_steps_table(tr, meta)));
  w.put("trace-hours.csv", io::to_csv(io::trace_hours_table(tr, meta)));
  w.put("days.csv", io::to_csv(io::day_records_table(days, meta)));

  double energy = 0.0;
  double peak = 0.0;
  double cost = 0.0;
  int binding = 0;
  for (const auto& d : days) {
    energy += d.energy();
    cost += d.cost();
    for (int h = 17; h < 21; ++h) peak += d.e_g[h];
  }
  for (const auto& h : tr.hours) binding += h.slack_binding;
  const json summary = {{"days", tr.days},
                        {"hp_energy_kwh", energy},
                        {"hp_cost_eur", cost},
                        {"peak_share", energy > 0.0 ? peak / energy : 0.0},
                        {"slack_binding_hours", binding},
                        {"solve_failures", tr.solve_failures},
                        {"mip_nodes", tr.mip_nodes}};
  w.put_json("run.json",
             {{"config", resolved}, {"config_digest", cd}, {"seed", c.run.seed},
              {"summary", summary}});
  std::printf("%s: %d day(s), %.2f kWh, %.2f EUR, peak share %.3f, %d solve failure(s)\n",
              plant::to_string(c.run.controller), tr.days, energy, cost,
              energy > 0.0 ? peak / energy : 0.0, tr.solve_failures);
  std::printf("wrote %s (config digest %s)\n", out.string().c_str(), cd.c_str());
}

// ---------------------------------------------------------------------------
// evaluate and report

void cmd_evaluate(const CompareArgs& a, const fs::path& out) {
  a.bounds.validate();
  const auto exp = load_days(a.exp);
  const auto bench = load_bench(a);
  const json cfg = compare_echo(a);
  const std::string cd = io::digest(cfg.dump());
  const evaluation::SavingsReport r = evaluation::savings_report(exp, bench, a.bounds);
  const io::CsvMeta meta = meta_for(cd, 0);

  io::CsvTable per_day = table("comparison", meta,
                              {"date", "t_mean", "pv_kwh", "exp_cost", "virtual_cost", "saving",
                               "saving_rate", "comparators"});
  io::CsvTable acc = table("accumulated", meta, {"index", "date", "saving_rate"});
  for (std::size_t i = 0; i < r.days.size(); ++i) {
    const auto& d = r.days[i];
    per_day.rows.push_back({d.date, io::fmt(d.t_mean), io::fmt(d.pv), io::fmt(d.exp_cost),
                            io::fmt(d.mean_virtual), io::fmt(d.saving), io::fmt(d.saving_rate),
                            std::to_string(d.comparator_costs.size())});
    acc.rows.push_back({std::to_string(i + 1), d.date, io::fmt(r.accumulated[i])});
  }
  Writer w{out};
  w.put("comparison.csv", io::to_csv(per_day));
  w.put("accumulated.csv", io::to_csv(acc));
  w.put_json("evaluation.json", {{"config", cfg},
                                 {"config_digest", cd},
                                 {"seed", 0},
                                 {"compared_days", r.days.size()},
                                 {"excluded_days", r.excluded},
                                 {"total_exp_eur", r.total_exp},
                                 {"total_virtual_eur", r.total_virtual},
                                 {"mean_benchmark_cost_eur", r.mean_benchmark_cost},
                                 {"mean_reduction_eur", r.mean_reduction},
                                 {"saving_rate", r.saving_rate}});
  std::printf("compared %zu day(s), excluded %zu; saving rate %.2f%% (%.2f of %.2f EUR)\n",
              r.days.size(), r.excluded.size(), 100.0 * r.saving_rate,
              r.total_virtual - r.total_exp, r.total_virtual);
}

void cmd_report(const CompareArgs& a, const fs::path& out) {
  a.bounds.validate();
  const auto exp = load_days(a.exp);
  const auto bench = load_bench(a);
  const json cfg = compare_echo(a);
  const std::string cd = io::digest(cfg.dump());
  const evaluation::SavingsReport r = evaluation::savings_report(exp, bench, a.bounds);
  const double mpc_reduction = r.total_virtual - r.total_exp;
  const evaluation::PeakBlockReport pb = evaluation::peak_block_analysis(bench, mpc_reduction);

  // Mean hourly profiles, the shape behind a load-shift plot.
  io::CsvTable prof = table("hourly-profile", meta_for(cd, 0),
                            {"hour", "exp_kwh", "bench_kwh", "exp_buy", "bench_buy"});
  double min_ratio = INFINITY;
  double mean_ratio = 0.0;
  for (const auto& d : exp) {
    const double ratio = evaluation::day_night_price_ratio(d.buy);
    min_ratio = std::min(min_ratio, ratio);
    mean_ratio += ratio / static_cast<double>(exp.size());
  }
  for (int h = 0; h < 24; ++h) {
    double ek = 0.0, bk = 0.0, eb = 0.0, bb = 0.0;
    for (const auto& d : exp) {
      ek += d.e_g[h];
      eb += d.buy[h];
    }
    for (const auto& d : bench) {
      bk += d.e_g[h];
      bb += d.buy[h];
    }
    const auto ne = static_cast<double>(exp.size());
    const auto nb = static_cast<double>(bench.size());
    prof.rows.push_back({std::to_string(h), io::fmt(ek / ne), io::fmt(bk / nb), io::fmt(eb / ne),
                         io::fmt(bb / nb)});
  }
  Writer w{out};
  w.put("hourly-profile.csv", io::to_csv(prof));
  w.put_json("report.json",
             {{"config", cfg},
              {"config_digest", cd},
              {"seed", 0},
              {"saving_rate", r.saving_rate},
              {"compared_days", r.days.size()},
              {"mpc_reduction_eur", mpc_reduction},
              {"day_night_ratio", {{"min", min_ratio}, {"mean", mean_ratio}}},
              {"peak_block",
               {{"peak_energy_kwh", pb.peak_energy_kwh},
                {"peak_heat_kwh", pb.peak_heat_kwh},
                {"mean_peak_price", pb.mean_peak_price},
                {"mean_post_price", pb.mean_post_price},
                {"reduction_eur", pb.reduction_eur},
                {"fraction", pb.fraction}}}});
  std::printf("saving rate %.2f%% over %zu day(s); day/night price ratio min %.2f\n",
              100.0 * r.saving_rate, r.days.size(), min_ratio);
  std::printf("blocking the 17-21 peak alone would save %.2f EUR, %.0f%% of the %.2f EUR saved\n",
              pb.reduction_eur, 100.0 * pb.fraction, mpc_reduction);
}

}  // namespace hpmpc::cli
