#pragma once

#include "hpmpc/evaluation.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace hpmpc::cli {

struct FitArgs {
  std::string kind;  ///< house, hp or pv
  std::filesystem::path data;
  std::string direction = "heat-from-power";
  bool robust = false;
  std::uint64_t seed = 20230127;
  double pv_peak_w = 4000.0;
};

struct GenerateArgs {
  std::string kind;  ///< scenario, hp-samples, house-samples, pv-history
  int days = 30;
  std::uint64_t seed = 1;
  double mean_temp_c = 5.0;
};

struct CompareArgs {
  std::filesystem::path exp;
  std::vector<std::filesystem::path> bench;
  evaluation::SearchBounds bounds;
};

/// Each command writes into `out` (created when missing) and prints a short
/// summary to stdout. Errors are thrown as library exceptions and mapped to
/// exit codes by the caller.
void cmd_fit(const FitArgs& a, const std::filesystem::path& out);
void cmd_generate(const GenerateArgs& a, const std::filesystem::path& out);
void cmd_simulate(const std::filesystem::path& config, const std::filesystem::path& out_override);
void cmd_evaluate(const CompareArgs& a, const std::filesystem::path& out);
void cmd_report(const CompareArgs& a, const std::filesystem::path& out);

}  // namespace hpmpc::cli
