#include "hpmpc/error.hpp"
#include "hpmpc/state_estimation.hpp"

#include <gtest/gtest.h>

using namespace hpmpc::building;
using namespace hpmpc::estimation;

namespace {

ThermalParams house() { return {3.5e6, 92e6, 2300.0, 80.0, 2.5, 1.0}; }

}  // namespace

TEST(Observability, UnitParameters) {
  const Observability o =
      observability_matrix(assemble_state_space({1.0, 1.0, 1.0, 1.0, 1.0, 1.0}));
  EXPECT_DOUBLE_EQ(o.matrix(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(o.matrix(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(o.matrix(1, 0), -2.0);
  EXPECT_DOUBLE_EQ(o.matrix(1, 1), 1.0);
  EXPECT_EQ(o.rank, 2);
}

TEST(Observability, DecoupledFloorLosesRank) {
  ContinuousStateSpace ss = assemble_state_space(house());
  ss.a(0, 1) = 0.0;
  ss.a(1, 0) = 0.0;
  EXPECT_EQ(observability_matrix(ss).rank, 1);
  EXPECT_EQ(observability_matrix(assemble_state_space(house())).rank, 2);
}

TEST(KalmanPredict, ZeroCovarianceGrowsByProcessNoise) {
  const DiscreteStateSpace m = discretize(assemble_state_space(house()), 300.0);
  KalmanState s;
  s.p.setZero();
  NoiseConfig n;
  n.q_proc = 0.3 * Mat2::Identity();
  const KalmanState next = kf_predict(s, 0.0, make_disturbance(0, 0, 0), m, n);
  EXPECT_TRUE(next.p.isApprox(0.3 * Mat2::Identity()));
  EXPECT_DOUBLE_EQ(next.time_s, 300.0);
}

TEST(KalmanPredict, NoiselessPropagationIsExact) {
  const DiscreteStateSpace m = discretize(assemble_state_space(house()), 300.0);
  NoiseConfig n;
  n.q_proc.setZero();
  KalmanState s;
  s.x = Vec2(21.0, 25.0);
  Vec2 truth = s.x;
  for (int k = 0; k < 100; ++k) {
    const Disturbance d = make_disturbance(2.0, 100.0, 0.3);
    s = kf_predict(s, 2000.0, d, m, n);
    truth = m.a * truth + m.b * 2000.0 + m.e * d.vec();
  }
  EXPECT_LT((s.x - truth).norm(), 1e-12);
}

TEST(KalmanUpdate, GainFromUnitPrior) {
  KalmanState s;
  s.x = Vec2(20.0, 22.0);
  s.p = Mat2::Identity();
  NoiseConfig n;
  n.r_meas = 1.0;
  const KalmanState u = kf_update(s, 21.0, n);
  // K = [0.5, 0]
  EXPECT_NEAR(u.x[0], 20.5, 1e-12);
  EXPECT_NEAR(u.x[1], 22.0, 1e-12);
  EXPECT_NEAR(u.p(0, 0), 0.5, 1e-12);
  EXPECT_DOUBLE_EQ(innovation(s, 21.0), 1.0);
}

TEST(KalmanUpdate, UninformativeMeasurement) {
  KalmanState s;
  s.x = Vec2(20.0, 22.0);
  NoiseConfig n;
  n.r_meas = 1e12;
  const KalmanState u = kf_update(s, 35.0, n);
  EXPECT_LT((u.x - s.x).norm(), 1e-6);
}

TEST(KalmanPredict, RejectsIndefiniteCovariance) {
  const DiscreteStateSpace m = discretize(assemble_state_space(house()), 300.0);
  KalmanState s;
  s.p << 1.0, 2.0, 2.0, 1.0;
  EXPECT_THROW(kf_predict(s, 0.0, make_disturbance(0, 0, 0), m, NoiseConfig{}),
               hpmpc::DomainError);
}
