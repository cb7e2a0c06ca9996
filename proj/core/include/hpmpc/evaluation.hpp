#pragma once

#include "hpmpc/error.hpp"
#include "hpmpc/plant_sim.hpp"
#include "hpmpc/pricing.hpp"

#include <string>
#include <vector>

namespace hpmpc::evaluation {

using pricing::Hourly;

/// No experiment day found any comparison day.
class NoComparatorsError : public Error {
 public:
  using Error::Error;
};

/// One day of hourly data, the unit of the comparison-day method.
struct DayRecord {
  std::string date;   ///< YYYY-MM-DD
  Hourly e_g{};       ///< billed HP electricity [kWh]
  Hourly t_amb{};     ///< degC
  Hourly buy{};       ///< EUR/kWh
  Hourly e_pv{};      ///< kWh
  /// Optional billing detail: raw HP consumption and house net import. When
  /// both sides carry it, comparator days are re-billed against the
  /// experiment day's PV situation.
  Hourly e_hp{};
  Hourly net_import{};
  bool has_billing = false;

  /// Throws DataError on negative or non-finite energies.
  void validate() const;
  [[nodiscard]] double mean_t_amb() const;
  [[nodiscard]] double pv_total() const;
  [[nodiscard]] double energy() const;
  /// Sum of buy * e_g.
  [[nodiscard]] double cost() const;
};

struct SearchBounds {
  double t_dn = 0.5;   ///< K
  double t_up = 0.5;
  double pv_dn = 2.0;  ///< kWh
  double pv_up = 2.0;
  void validate() const;
};

/// Benchmark days within the (inclusive) temperature and PV window.
std::vector<DayRecord> select_comparison_days(const DayRecord& exp,
                                              const std::vector<DayRecord>& bench,
                                              const SearchBounds& b);

/// Comparator consumption priced at the experiment day's prices.
double virtual_cost(const DayRecord& cmp, const Hourly& exp_prices);
/// As above, re-billing the comparator's HP energy against the experiment
/// day's net import when both records carry billing detail.
double virtual_cost(const DayRecord& cmp, const DayRecord& exp);

struct DayResult {
  std::string date;
  double t_mean = 0.0;
  double pv = 0.0;
  double exp_cost = 0.0;
  double mean_virtual = 0.0;
  double saving = 0.0;
  double saving_rate = 0.0;
  std::vector<double> comparator_costs;
};

struct SavingsReport {
  std::vector<DayResult> days;
  std::vector<std::string> excluded;  ///< experiment days without comparators
  double total_exp = 0.0;
  double total_virtual = 0.0;
  double mean_benchmark_cost = 0.0;  ///< per compared day
  double mean_reduction = 0.0;
  double saving_rate = 0.0;
  /// Saving rate of the first k compared days, k = 1..n.
  std::vector<double> accumulated;
};

/// Throws NoComparatorsError when no experiment day has comparators.
SavingsReport savings_report(const std::vector<DayRecord>& exp,
                             const std::vector<DayRecord>& bench,
                             const SearchBounds& b);

/// mean(prices[6..24)) / mean(prices[0..6)). Throws DomainError on negative
/// prices or a zero night mean.
double day_night_price_ratio(const Hourly& prices);

struct PeakBlockOptions {
  int peak_from = 17;
  int peak_to = 21;   ///< exclusive
  int post_from = 21;
  int post_to = 1;    ///< exclusive, wraps past midnight
  double assumed_cop = 4.2;
};

struct PeakBlockReport {
  double peak_energy_kwh = 0.0;  ///< baseline electricity in the peak
  double peak_heat_kwh = 0.0;    ///< the same at the assumed COP
  double mean_peak_price = 0.0;
  double mean_post_price = 0.0;
  double reduction_eur = 0.0;    ///< cost saved by moving it past the peak
  double mpc_reduction_eur = 0.0;
  double fraction = 0.0;         ///< reduction / MPC reduction
};

/// What a plain evening block would have saved: the baseline's peak-window
/// electricity re-priced at the post-peak mean price. Prices are averaged
/// over the days. Post-peak hours after midnight come from the same record.
/// Throws DataError when a window is empty.
PeakBlockReport peak_block_analysis(const std::vector<DayRecord>& baseline,
                                    double mpc_reduction_eur,
                                    const PeakBlockOptions& options = {});

/// Whole days of a trace as records: e_g is the HP share of the hour's net
/// import, hot water excluded.
std::vector<DayRecord> day_records(const plant::SimTrace& trace);

/// Per-day cost of each trace, same-day pairing.
std::vector<double> daily_costs(const std::vector<DayRecord>& days);

}  // namespace hpmpc::evaluation
