#include "hpmpc/error.hpp"
#include "hpmpc/heat_controller.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace hpmpc::heatctl;

TEST(Pid, ZeroErrorSitsAtBias) {
  const PidOutput o = pid_step(1000.0, 1000.0, PidGains{}, 60.0, PidState{}, 4.0);
  EXPECT_DOUBLE_EQ(o.t_artificial, 4.0);
  EXPECT_FALSE(o.saturated);
}

TEST(Pid, PersistentDeficitCoolsReadingUntilClamp) {
  PidGains g;
  PidState s;
  double last = 1e9;
  bool clamped = false;
  for (int k = 0; k < 2000 && !clamped; ++k) {
    const PidOutput o = pid_step(0.0, 1500.0, g, 60.0, s, 5.0);
    EXPECT_LE(o.t_artificial, last);
    last = o.t_artificial;
    s = o.state;
    clamped = o.saturated;
  }
  ASSERT_TRUE(clamped);
  EXPECT_DOUBLE_EQ(last, g.out_min);
  // Anti-windup: the integrator stops moving once clamped.
  const PidOutput a = pid_step(0.0, 1500.0, g, 60.0, s, 5.0);
  const PidOutput b = pid_step(0.0, 1500.0, g, 60.0, a.state, 5.0);
  EXPECT_DOUBLE_EQ(a.state.integral, b.state.integral);
}

TEST(BudgetStep, HandValues) {
  EXPECT_DOUBLE_EQ(budget_step(2000.0, 500.0, 30.0, 4000.0), 3000.0);
  EXPECT_DOUBLE_EQ(budget_step(2000.0, 2000.0, 30.0, 4000.0), 0.0);
  EXPECT_DOUBLE_EQ(budget_step(4000.0, 0.0, 30.0, 4000.0), 4000.0);
  EXPECT_THROW(budget_step(100.0, 0.0, 0.0, 4000.0), hpmpc::DomainError);
}

TEST(Defrost, TwoSampleDebounce) {
  EXPECT_FALSE(detect_defrost({500.0}));
  EXPECT_TRUE(detect_defrost({-500.0, -500.0}));
  EXPECT_FALSE(detect_defrost({-500.0, 200.0}));
  EXPECT_FALSE(detect_defrost({-500.0}));
  DefrostDetector d;
  EXPECT_FALSE(d.update(-500.0));
  EXPECT_TRUE(d.update(-500.0));
  EXPECT_FALSE(d.update(100.0));
}

TEST(BlockRelease, Timeline) {
  const auto none = schedule_block_release(std::vector<double>(6, 0.0), 90.0);
  EXPECT_TRUE(std::all_of(none.begin(), none.end(), [](bool b) { return b; }));

  std::vector<double> q(8, 0.0);
  q[5] = 800.0;
  q[6] = 900.0;
  const auto tl = schedule_block_release(q, 90.0);
  EXPECT_TRUE(tl[209]);
  EXPECT_FALSE(tl[210]);  // 03:30
  for (int m = 210; m < 420; ++m) EXPECT_FALSE(tl[m]) << m;
  EXPECT_TRUE(tl[420]);
  EXPECT_THROW(schedule_block_release(q, -1.0), hpmpc::DomainError);
}

TEST(Step, HotWaterTakesPriority) {
  HeatCtlConfig cfg;
  HeatCtlInputs in;
  in.q_ref_hour_wh = 1500.0;
  in.released = true;
  in.seconds_into_hour = 600.0;
  StepOutput o = step(in, HeatCtlState{}, cfg);
  EXPECT_EQ(o.state.mode, Mode::Active);
  in.dhw_active = true;
  in.seconds_into_hour = 660.0;
  o = step(in, o.state, cfg);
  EXPECT_EQ(o.state.mode, Mode::StandbyDhw);
}

TEST(Step, BlockedAndPrestart) {
  HeatCtlConfig cfg;
  HeatCtlInputs in;
  in.q_ref_hour_wh = 0.0;
  StepOutput o = step(in, HeatCtlState{}, cfg);
  EXPECT_EQ(o.state.mode, Mode::Blocked);
  EXPECT_TRUE(o.command.compressor_block);
  in.released = true;
  o = step(in, o.state, cfg);
  EXPECT_EQ(o.state.mode, Mode::Prestart);
  EXPECT_FALSE(o.command.compressor_block);
  EXPECT_DOUBLE_EQ(o.command.t_artificial, cfg.idle_t_artificial);
}

TEST(Step, DefrostAfterTwoReversedSamples) {
  HeatCtlConfig cfg;
  HeatCtlInputs in;
  in.q_ref_hour_wh = 1500.0;
  in.released = true;
  in.dq_meas_w = -800.0;
  StepOutput o = step(in, HeatCtlState{}, cfg);
  EXPECT_EQ(o.state.mode, Mode::Active);
  o = step(in, o.state, cfg);
  EXPECT_EQ(o.state.mode, Mode::StandbyDefrost);
}

TEST(Step, TracksBudgetOnIdealPlant) {
  // Plant: heat proportional to how far the reading sits below 20 degC.
  HeatCtlConfig cfg;
  HeatCtlState s;
  double dq = 0.0;
  const double budget = 1500.0;
  for (int m = 0; m < 60; ++m) {
    HeatCtlInputs in;
    in.dq_meas_w = dq;
    in.hour_index = 7;
    in.seconds_into_hour = 60.0 * m;
    in.q_ref_hour_wh = budget;
    in.released = true;
    in.t_amb_bias_c = 5.0;
    const StepOutput o = step(in, s, cfg);
    s = o.state;
    dq = std::clamp(250.0 * (20.0 - o.command.t_artificial), 0.0, 4000.0);
  }
  const double delivered = s.e_acc_wh + dq * 60.0 / 3600.0 - 0.0;
  EXPECT_NEAR(delivered, budget, 0.05 * budget);
}
