#include "hpmpc/evaluation.hpp"

#include "hpmpc/scenario.hpp"

#include <cmath>
#include <numeric>

namespace hpmpc::evaluation {

namespace {

double sum(const Hourly& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

void check_energy(const Hourly& v, const std::string& date, const char* what) {
  for (int h = 0; h < 24; ++h) {
    if (!std::isfinite(v[h]) || v[h] < 0.0) {
      throw DataError("day " + date + ": " + what + " at hour " + std::to_string(h) +
                      " is negative or missing");
    }
  }
}

}  // namespace

void DayRecord::validate() const {
  check_energy(e_g, date, "E_G");
  check_energy(e_pv, date, "E_PV");
  check_energy(buy, date, "buy price");
  for (double t : t_amb) {
    if (!std::isfinite(t)) throw DataError("day " + date + ": ambient temperature missing");
  }
  if (has_billing) check_energy(e_hp, date, "E_HP");
}

double DayRecord::mean_t_amb() const { return sum(t_amb) / 24.0; }
double DayRecord::pv_total() const { return sum(e_pv); }
double DayRecord::energy() const { return sum(e_g); }

double DayRecord::cost() const {
  double c = 0.0;
  for (int h = 0; h < 24; ++h) c += buy[h] * e_g[h];
  return c;
}

void SearchBounds::validate() const {
  if (t_dn < 0.0 || t_up < 0.0 || pv_dn < 0.0 || pv_up < 0.0) {
    throw ConfigError("search bounds must be nonnegative");
  }
}

std::vector<DayRecord> select_comparison_days(const DayRecord& exp,
                                              const std::vector<DayRecord>& bench,
                                              const SearchBounds& b) {
  b.validate();
  if (bench.empty()) throw DataError("benchmark set is empty");
  const double t = exp.mean_t_amb();
  const double pv = exp.pv_total();
  std::vector<DayRecord> out;
  for (const DayRecord& d : bench) {
    const double dt = d.mean_t_amb() - t;
    const double dpv = d.pv_total() - pv;
    if (dt >= -b.t_dn && dt <= b.t_up && dpv >= -b.pv_dn && dpv <= b.pv_up) {
      out.push_back(d);
    }
  }
  return out;
}

double virtual_cost(const DayRecord& cmp, const Hourly& exp_prices) {
  double c = 0.0;
  for (int h = 0; h < 24; ++h) c += exp_prices[h] * cmp.e_g[h];
  return c;
}

double virtual_cost(const DayRecord& cmp, const DayRecord& exp) {
  if (!(cmp.has_billing && exp.has_billing)) return virtual_cost(cmp, exp.buy);
  double c = 0.0;
  for (int h = 0; h < 24; ++h) {
    c += exp.buy[h] * pricing::corrected_benchmark_billable(cmp.e_hp[h], exp.e_hp[h],
                                                             exp.net_import[h]);
  }
  return c;
}

SavingsReport savings_report(const std::vector<DayRecord>& exp,
                             const std::vector<DayRecord>& bench,
                             const SearchBounds& b) {
  SavingsReport r;
  double acc_exp = 0.0;
  double acc_virtual = 0.0;
  for (const DayRecord& e : exp) {
    const auto cmp = select_comparison_days(e, bench, b);
    if (cmp.empty()) {
      r.excluded.push_back(e.date);
      continue;
    }
    DayResult d;
    d.date = e.date;
    d.t_mean = e.mean_t_amb();
    d.pv = e.pv_total();
    d.exp_cost = e.cost();
    for (const DayRecord& c : cmp) d.comparator_costs.push_back(virtual_cost(c, e));
    d.mean_virtual = std::accumulate(d.comparator_costs.begin(), d.comparator_costs.end(), 0.0) /
                     static_cast<double>(d.comparator_costs.size());
    d.saving = d.mean_virtual - d.exp_cost;
    d.saving_rate = d.mean_virtual > 0.0 ? d.saving / d.mean_virtual : 0.0;
    acc_exp += d.exp_cost;
    acc_virtual += d.mean_virtual;
    r.accumulated.push_back(acc_virtual > 0.0 ? (acc_virtual - acc_exp) / acc_virtual : 0.0);
    r.days.push_back(std::move(d));
  }
  if (r.days.empty()) {
    throw NoComparatorsError("no experiment day has a comparison day within the search bounds");
  }
  r.total_exp = acc_exp;
  r.total_virtual = acc_virtual;
  const auto n = static_cast<double>(r.days.size());
  r.mean_benchmark_cost = acc_virtual / n;
  r.mean_reduction = (acc_virtual - acc_exp) / n;
  r.saving_rate = r.accumulated.back();
  return r;
}

double day_night_price_ratio(const Hourly& prices) {
  double night = 0.0;
  double day = 0.0;
  for (int h = 0; h < 24; ++h) {
    if (!(prices[h] >= 0.0)) throw DomainError("prices must be nonnegative");
    (h < 6 ? night : day) += prices[h];
  }
  night /= 6.0;
  day /= 18.0;
  if (night <= 0.0) throw DomainError("night mean price is zero");
  return day / night;
}

PeakBlockReport peak_block_analysis(const std::vector<DayRecord>& baseline,
                                    double mpc_reduction_eur,
                                    const PeakBlockOptions& o) {
  if (baseline.empty()) throw DataError("peak-block analysis needs baseline days");
  auto hours_of = [](int from, int to) {
    std::vector<int> hs;
    for (int h = from; h != to; h = (h + 1) % 24) hs.push_back(h);
    return hs;
  };
  if (o.peak_from < 0 || o.peak_from > 23 || o.peak_to < 0 || o.peak_to > 24 ||
      o.post_from < 0 || o.post_from > 23 || o.post_to < 0 || o.post_to > 24) {
    throw DataError("peak-block windows must lie within the day");
  }
  const auto peak = hours_of(o.peak_from, o.peak_to % 24);
  const auto post = hours_of(o.post_from, o.post_to % 24);
  if (peak.empty() || post.empty()) throw DataError("peak-block window is empty");
  if (!(o.assumed_cop > 0.0)) throw DomainError("assumed COP must be positive");

  PeakBlockReport r;
  double peak_price = 0.0;
  double post_price = 0.0;
  for (const DayRecord& d : baseline) {
    for (int h : peak) {
      r.peak_energy_kwh += d.e_g[h];
      peak_price += d.buy[h];
    }
    for (int h : post) post_price += d.buy[h];
  }
  const auto n = static_cast<double>(baseline.size());
  r.mean_peak_price = peak_price / (n * static_cast<double>(peak.size()));
  r.mean_post_price = post_price / (n * static_cast<double>(post.size()));
  r.peak_heat_kwh = r.peak_energy_kwh * o.assumed_cop;
  // The same heat at the same COP later on costs the same energy.
  r.reduction_eur = r.peak_energy_kwh * (r.mean_peak_price - r.mean_post_price);
  r.mpc_reduction_eur = mpc_reduction_eur;
  r.fraction = mpc_reduction_eur > 0.0 ? r.reduction_eur / mpc_reduction_eur : 0.0;
  return r;
}

std::vector<DayRecord> day_records(const plant::SimTrace& trace) {
  std::vector<DayRecord> out;
  const std::size_t days = trace.hours.size() / 24;
  for (std::size_t d = 0; d < days; ++d) {
    DayRecord r;
    r.date = scenario::iso8601(static_cast<std::int64_t>(trace.hours[d * 24].time_s)).substr(0, 10);
    r.has_billing = true;
    for (int h = 0; h < 24; ++h) {
      const plant::HourRecord& hr = trace.hours[d * 24 + h];
      pricing::HourlyEnergy e;
      e.e_import = hr.e_import;
      e.e_export = hr.e_export;
      e.e_pv = hr.e_pv;
      e.e_hp = hr.e_hp;
      const pricing::Billable bill = pricing::hp_billable_energy(e);
      r.e_g[h] = bill.e_hp;
      r.e_hp[h] = hr.e_hp;
      r.net_import[h] = bill.net_import;
      r.t_amb[h] = hr.t_amb;
      r.buy[h] = hr.buy;
      r.e_pv[h] = hr.e_pv;
    }
    out.push_back(r);
  }
  return out;
}

std::vector<double> daily_costs(const std::vector<DayRecord>& days) {
  std::vector<double> out;
  out.reserve(days.size());
  for (const DayRecord& d : days) out.push_back(d.cost());
  return out;
}

}  // namespace hpmpc::evaluation
