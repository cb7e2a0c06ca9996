#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace hpmpc::pricing {

using Hourly = std::array<double, 24>;

/// Fixed-point euro amount with 1e-6 resolution so sums do not depend on
/// summation order and reports are bit-reproducible.
class Money {
 public:
  constexpr Money() = default;
  static Money from_euro(double euro);
  static constexpr Money from_micros(std::int64_t m) {
    Money x;
    x.micros_ = m;
    return x;
  }
  [[nodiscard]] constexpr std::int64_t micros() const { return micros_; }
  [[nodiscard]] double euro() const { return static_cast<double>(micros_) * 1e-6; }
  [[nodiscard]] std::string str() const;  ///< "12.345678"

  Money& operator+=(Money o) {
    micros_ += o.micros_;
    return *this;
  }
  friend Money operator+(Money a, Money b) { return a += b; }
  friend Money operator-(Money a, Money b) {
    return from_micros(a.micros_ - b.micros_);
  }
  friend constexpr auto operator<=>(Money, Money) = default;

 private:
  std::int64_t micros_ = 0;
};

struct TariffBand {
  int start_hour = 0;  ///< inclusive
  int end_hour = 24;   ///< exclusive
  double rate = 0.0;   ///< EUR/kWh
};

/// Time-of-use grid tariff. The bands must partition [0, 24).
class TariffSchedule {
 public:
  /// Throws ConfigError on gaps, overlaps or negative rates.
  explicit TariffSchedule(std::vector<TariffBand> bands);

  [[nodiscard]] double at(int hour) const;
  [[nodiscard]] const std::vector<TariffBand>& bands() const { return bands_; }

 private:
  std::vector<TariffBand> bands_;
};

/// Night 0.027, day 0.081, evening peak 17-21 at 0.26 EUR/kWh.
TariffSchedule default_tariff();

/// Rate of the band containing `hour`. Throws DomainError outside 0..23.
double tariff_at(int hour, const TariffSchedule& t);

struct PriceInputs {
  Hourly spot{};           ///< EUR/kWh
  Hourly co2_intensity{};  ///< kg/kWh
  TariffSchedule tariff = default_tariff();
  double c_tso = 0.02;     ///< EUR/kWh
  double c_co2 = 0.0;      ///< EUR/kg
  double vat_rate = 0.25;

  /// Throws ConfigError on negative components.
  void validate() const;
};

/// (spot + tariff + w_co2 * c_co2 + c_tso) * (1 + vat) per hour.
Hourly buy_price(const PriceInputs& p);
/// Export is paid at spot.
Hourly sell_price(const PriceInputs& p);

struct HourlyEnergy {
  double e_import = 0.0;  ///< kWh
  double e_export = 0.0;
  double e_pv = 0.0;
  double e_hp = 0.0;
};

struct Billable {
  double net_import = 0.0;  ///< E_IM - E_EX
  double e_hp = 0.0;        ///< HP share of the billed import
};

/// The HP pays for at most what the house actually imported in the hour.
Billable hp_billable_energy(const HourlyEnergy& e);

/// Comparator-day HP consumption re-billed against the experiment's PV
/// situation: the virtual net import grows by the HP consumption difference.
double corrected_benchmark_billable(double e_hp_cmp, double e_hp_exp,
                                    double net_import_exp);

}  // namespace hpmpc::pricing
