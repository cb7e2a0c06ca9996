#pragma once

#include "hpmpc/building_model.hpp"
#include "hpmpc/evaluation.hpp"
#include "hpmpc/hp_efficiency.hpp"
#include "hpmpc/plant_sim.hpp"
#include "hpmpc/scenario.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hpmpc::io {

/// Readers accept this major version only.
inline constexpr int kSchemaMajor = 1;

std::uint64_t fnv1a(std::string_view data);
/// 16 lowercase hex digits of fnv1a.
std::string digest(std::string_view data);

/// Shortest text that reads back to the same double; "nan" for NaN.
std::string fmt(double v);
/// Parses a number field; empty or "nan" gives NaN. Throws DataError.
double parse_number(const std::string& s);

/// First line of every file: "# schema=NAME version=1.0 digest=HEX seed=N".
struct CsvMeta {
  std::string schema;
  std::string version = "1.0";
  std::string digest;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> extra;

  [[nodiscard]] std::string get(const std::string& key) const;
};

struct CsvTable {
  CsvMeta meta;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index; throws DataError naming the missing column.
  [[nodiscard]] int column(const std::string& name) const;
  /// Numeric cell with row/column context in the error.
  [[nodiscard]] double number(std::size_t row, int col) const;
};

std::string to_csv(const CsvTable& t);

/// Throws DataError for a missing or malformed meta line, another schema,
/// an unknown major version, a missing header column or a ragged row.
CsvTable parse_csv(const std::string& text, const std::string& schema,
                   const std::vector<std::string>& required);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// Domain tables. `meta` supplies digest and seed; the schema is set here.

CsvTable scenario_table(const scenario::Scenario& s, CsvMeta meta);
scenario::Scenario scenario_from_table(const CsvTable& t);

CsvTable trace_steps_table(const plant::SimTrace& t, CsvMeta meta);
CsvTable trace_hours_table(const plant::SimTrace& t, CsvMeta meta);
/// Hourly part of a trace, enough for the evaluation.
plant::SimTrace trace_from_hours(const CsvTable& t);

CsvTable day_records_table(const std::vector<evaluation::DayRecord>& d, CsvMeta meta);
std::vector<evaluation::DayRecord> day_records_from_table(const CsvTable& t);

/// timestamp,t_room,q_hp_w,t_amb,i_dir,cloud (empty cells are gaps).
std::vector<building::ThermalSample> thermal_samples_from_table(const CsvTable& t);
/// timestamp,p_w,q_w,t_amb
std::vector<efficiency::OperatingSample> operating_samples_from_table(const CsvTable& t);
/// timestamp,t_amb,i_dir,cloud,pv_w
void pv_history_from_table(const CsvTable& t, forecasting::WeatherSeries& weather,
                           std::vector<double>& pv_w);

}  // namespace hpmpc::io
