#include "hpmpc/error.hpp"
#include "hpmpc/pricing.hpp"

#include <gtest/gtest.h>

using namespace hpmpc::pricing;

TEST(Tariff, DefaultBands) {
  const TariffSchedule t = default_tariff();
  for (int h = 0; h < 24; ++h) {
    const double want = h < 6 ? 0.027 : (h >= 17 && h < 21 ? 0.26 : 0.081);
    EXPECT_DOUBLE_EQ(tariff_at(h, t), want) << "hour " << h;
  }
  EXPECT_DOUBLE_EQ(tariff_at(3, t), 0.027);
  EXPECT_DOUBLE_EQ(tariff_at(18, t), 0.26);
  EXPECT_DOUBLE_EQ(tariff_at(22, t), 0.081);
  EXPECT_THROW(tariff_at(24, t), hpmpc::DomainError);
  EXPECT_THROW(tariff_at(-1, t), hpmpc::DomainError);
}

TEST(Tariff, BandsMustPartitionTheDay) {
  EXPECT_THROW(TariffSchedule({{0, 10, 0.1}, {11, 24, 0.1}}), hpmpc::ConfigError);
  EXPECT_THROW(TariffSchedule({{0, 12, 0.1}, {10, 24, 0.1}}), hpmpc::ConfigError);
  EXPECT_THROW(TariffSchedule({{0, 24, -0.1}}), hpmpc::ConfigError);
  EXPECT_NO_THROW(TariffSchedule({{12, 24, 0.2}, {0, 12, 0.1}}));
}

TEST(BuyPrice, HandComputed) {
  PriceInputs p;
  p.spot.fill(0.10);
  const Hourly b = buy_price(p);
  EXPECT_NEAR(b[8], (0.10 + 0.081 + 0.02) * 1.25, 1e-12);
  EXPECT_NEAR(b[8], 0.25125, 1e-12);
  EXPECT_NEAR(b[2], (0.10 + 0.027 + 0.02) * 1.25, 1e-12);
  EXPECT_NEAR(b[18], (0.10 + 0.26 + 0.02) * 1.25, 1e-12);
}

TEST(BuyPrice, ComponentsInIsolation) {
  PriceInputs zero;
  zero.tariff = TariffSchedule({{0, 24, 0.0}});
  zero.c_tso = 0.0;
  for (double v : buy_price(zero)) EXPECT_EQ(v, 0.0);

  PriceInputs co2 = zero;
  co2.vat_rate = 0.0;
  co2.c_co2 = 0.05;
  co2.co2_intensity.fill(0.2);
  for (double v : buy_price(co2)) EXPECT_NEAR(v, 0.01, 1e-15);

  PriceInputs bad;
  bad.c_tso = -0.01;
  EXPECT_THROW(bad.validate(), hpmpc::ConfigError);
}

TEST(SellPrice, IsSpotAndBelowBuy) {
  PriceInputs p;
  p.spot.fill(0.10);
  for (double v : sell_price(p)) EXPECT_DOUBLE_EQ(v, 0.10);
  const Hourly b = buy_price(p);
  const Hourly s = sell_price(p);
  for (int h = 0; h < 24; ++h) EXPECT_GT(b[h] - s[h], 0.0);
  p.spot.fill(0.0);
  for (double v : sell_price(p)) EXPECT_EQ(v, 0.0);
}

TEST(Billable, HandValues) {
  const Billable b = hp_billable_energy({2.0, 0.5, 0.0, 3.0});
  EXPECT_DOUBLE_EQ(b.net_import, 1.5);
  EXPECT_DOUBLE_EQ(b.e_hp, 1.5);
  EXPECT_DOUBLE_EQ(hp_billable_energy({1.0, 3.0, 4.0, 2.0}).e_hp, 0.0);
  EXPECT_DOUBLE_EQ(hp_billable_energy({2.0, 2.0, 1.0, 2.0}).e_hp, 0.0);
  EXPECT_DOUBLE_EQ(hp_billable_energy({5.0, 0.0, 0.0, 0.0}).e_hp, 0.0);
  EXPECT_DOUBLE_EQ(hp_billable_energy({5.0, 0.0, 0.0, 1.2}).e_hp, 1.2);
}

TEST(Billable, CorrectedBenchmark) {
  EXPECT_DOUBLE_EQ(corrected_benchmark_billable(2.0, 1.0, 0.5), 1.5);
  EXPECT_DOUBLE_EQ(corrected_benchmark_billable(2.0, 0.0, -5.0), 0.0);
  // No correction: same as billing the comparator directly.
  const Billable direct = hp_billable_energy({2.0, 0.5, 0.0, 3.0});
  EXPECT_DOUBLE_EQ(corrected_benchmark_billable(3.0, 3.0, 1.5), direct.e_hp);
}

TEST(Money, FixedPointSums) {
  Money a = Money::from_euro(0.1);
  Money sum;
  for (int i = 0; i < 10; ++i) sum += a;
  EXPECT_EQ(sum, Money::from_euro(1.0));
  EXPECT_EQ(Money::from_euro(12.3456786).micros(), 12345679);
  EXPECT_EQ(Money::from_euro(-1.5).str(), "-1.500000");
  EXPECT_EQ(Money::from_micros(42).str(), "0.000042");
}
