#include "hpmpc/pricing.hpp"

#include "hpmpc/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace hpmpc::pricing {

Money Money::from_euro(double euro) {
  if (!std::isfinite(euro)) throw DomainError("money amount is not finite");
  return from_micros(std::llround(euro * 1e6));
}

std::string Money::str() const {
  const std::int64_t a = std::llabs(micros_);
  char buf[48];
  std::snprintf(buf, sizeof buf, "%s%lld.%06lld", micros_ < 0 ? "-" : "",
                static_cast<long long>(a / 1000000),
                static_cast<long long>(a % 1000000));
  return buf;
}

TariffSchedule::TariffSchedule(std::vector<TariffBand> bands)
    : bands_(std::move(bands)) {
  std::sort(bands_.begin(), bands_.end(),
            [](const TariffBand& a, const TariffBand& b) {
              return a.start_hour < b.start_hour;
            });
  int expect = 0;
  for (const auto& b : bands_) {
    if (b.start_hour != expect) {
      throw ConfigError("tariff bands leave a gap or overlap at hour " +
                        std::to_string(expect));
    }
    if (b.end_hour <= b.start_hour || b.end_hour > 24) {
      throw ConfigError("tariff band has an empty or out-of-range interval");
    }
    if (!(b.rate >= 0.0) || !std::isfinite(b.rate)) {
      throw ConfigError("tariff rate must be nonnegative");
    }
    expect = b.end_hour;
  }
  if (expect != 24) {
    throw ConfigError("tariff bands do not cover the full day");
  }
}

double TariffSchedule::at(int hour) const {
  if (hour < 0 || hour > 23) throw DomainError("hour must be in 0..23");
  for (const auto& b : bands_) {
    if (hour >= b.start_hour && hour < b.end_hour) return b.rate;
  }
  throw DomainError("hour not covered by tariff");  // unreachable after ctor
}

TariffSchedule default_tariff() {
  return TariffSchedule({{0, 6, 0.027}, {6, 17, 0.081}, {17, 21, 0.26},
                         {21, 24, 0.081}});
}

double tariff_at(int hour, const TariffSchedule& t) { return t.at(hour); }

void PriceInputs::validate() const {
  for (int h = 0; h < 24; ++h) {
    if (!(spot[h] >= 0.0) || !(co2_intensity[h] >= 0.0)) {
      throw ConfigError("spot price and CO2 intensity must be nonnegative (hour " +
                        std::to_string(h) + ")");
    }
  }
  if (!(c_tso >= 0.0) || !(c_co2 >= 0.0) || !(vat_rate >= 0.0)) {
    throw ConfigError("TSO fee, CO2 price and VAT rate must be nonnegative");
  }
}

Hourly buy_price(const PriceInputs& p) {
  p.validate();
  Hourly out{};
  for (int h = 0; h < 24; ++h) {
    out[h] = (p.spot[h] + p.tariff.at(h) + p.co2_intensity[h] * p.c_co2 +
              p.c_tso) *
             (1.0 + p.vat_rate);
  }
  return out;
}

Hourly sell_price(const PriceInputs& p) {
  p.validate();
  return p.spot;
}

Billable hp_billable_energy(const HourlyEnergy& e) {
  Billable b;
  b.net_import = e.e_import - e.e_export;
  b.e_hp = b.net_import <= 0.0 ? 0.0 : std::min(e.e_hp, b.net_import);
  return b;
}

double corrected_benchmark_billable(double e_hp_cmp, double e_hp_exp,
                                    double net_import_exp) {
  const double corrected = net_import_exp + (e_hp_cmp - e_hp_exp);
  return corrected <= 0.0 ? 0.0 : std::min(e_hp_cmp, corrected);
}

}  // namespace hpmpc::pricing
