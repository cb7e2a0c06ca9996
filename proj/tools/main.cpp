// hpmpc: fit models, run closed-loop simulations and evaluate them.
//
// Exit codes: 0 ok, 2 configuration or usage error, 3 data error,
// 4 no comparison days within the search bounds, 1 anything else.

#include "commands.hpp"

#include "hpmpc/error.hpp"
#include "hpmpc/evaluation.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>

#include "CLI11.hpp"

namespace fs = std::filesystem;
using namespace hpmpc;

namespace {

enum Exit { kOk = 0, kOther = 1, kConfig = 2, kData = 3, kNoComparators = 4 };

// --output-dir wins over HPMPC_OUTPUT_DIR, which wins over the fallback.
fs::path output_dir(const std::string& flag, const std::string& fallback) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("HPMPC_OUTPUT_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
  return fallback;
}

void add_compare_options(CLI::App* cmd, cli::CompareArgs& a) {
  cmd->add_option("--exp", a.exp, "Experiment trace (directory or trace-hours.csv)")->required();
  cmd->add_option("--bench", a.bench, "Benchmark trace(s); repeat to pool several")->required();
  cmd->add_option("--t-dn", a.bounds.t_dn, "Allowed mean-temperature deficit of a comparator [K]");
  cmd->add_option("--t-up", a.bounds.t_up, "Allowed mean-temperature excess [K]");
  cmd->add_option("--pv-dn", a.bounds.pv_dn, "Allowed PV energy deficit [kWh]");
  cmd->add_option("--pv-up", a.bounds.pv_up, "Allowed PV energy excess [kWh]");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Price-responsive heat pump MPC: fitting, simulation and evaluation"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string out_flag;
  app.add_option("-o,--output-dir", out_flag,
                 "Output directory (overrides HPMPC_OUTPUT_DIR and the config)");

  cli::FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a house, heat pump or PV model to a CSV sample");
  fit_cmd->add_option("kind", fit.kind, "house, hp or pv")->required();
  fit_cmd->add_option("--data", fit.data, "Input CSV")->required();
  fit_cmd->add_option("--direction", fit.direction,
                      "hp only: heat-from-power or power-from-heat");
  fit_cmd->add_flag("--robust", fit.robust, "hp only: RANSAC outlier rejection");
  fit_cmd->add_option("--seed", fit.seed, "Seed for randomized fitting steps");
  fit_cmd->add_option("--p-peak", fit.pv_peak_w, "pv only: inverter limit [W]");

  cli::GenerateArgs gen;
  auto* gen_cmd =
      app.add_subcommand("generate", "Write synthetic inputs: scenario or fitting samples");
  gen_cmd->add_option("kind", gen.kind, "scenario, hp-samples, house-samples or pv-history")
      ->required();
  gen_cmd->add_option("--days", gen.days, "Days to cover");
  gen_cmd->add_option("--seed", gen.seed, "Random seed");
  gen_cmd->add_option("--mean-temp", gen.mean_temp_c, "Mean outdoor temperature [C]");

  std::string config;
  auto* sim_cmd = app.add_subcommand("simulate", "Run the closed loop described by a JSON config");
  sim_cmd->add_option("config", config, "Run configuration (JSON)")->required();

  cli::CompareArgs eval;
  auto* eval_cmd =
      app.add_subcommand("evaluate", "Savings of an experiment trace against benchmark days");
  add_compare_options(eval_cmd, eval);

  cli::CompareArgs rep;
  auto* rep_cmd = app.add_subcommand(
      "report", "Plot data and peak-block analysis for an experiment/benchmark pair");
  add_compare_options(rep_cmd, rep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    if (*fit_cmd) cli::cmd_fit(fit, output_dir(out_flag, "hpmpc-out"));
    if (*gen_cmd) cli::cmd_generate(gen, output_dir(out_flag, "hpmpc-out"));
    if (*sim_cmd) cli::cmd_simulate(config, output_dir(out_flag, ""));
    if (*eval_cmd) cli::cmd_evaluate(eval, output_dir(out_flag, "hpmpc-out"));
    if (*rep_cmd) cli::cmd_report(rep, output_dir(out_flag, "hpmpc-out"));
  } catch (const evaluation::NoComparatorsError& e) {
    std::fprintf(stderr, "hpmpc: %s\n", e.what());
    return kNoComparators;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "hpmpc: configuration error: %s\n", e.what());
    return kConfig;
  } catch (const DataError& e) {
    std::fprintf(stderr, "hpmpc: data error: %s\n", e.what());
    return kData;
  } catch (const FitError& e) {
    std::fprintf(stderr, "hpmpc: fit failed: %s\n", e.what());
    return kData;
  } catch (const DomainError& e) {
    std::fprintf(stderr, "hpmpc: invalid input: %s\n", e.what());
    return kData;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "hpmpc: %s\n", e.what());
    return kOther;
  }
  return kOk;
}
