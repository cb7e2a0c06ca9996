#include "hpmpc/error.hpp"
#include "hpmpc/valve_dispatch.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace hpmpc::valves;

namespace {

ValveProblem two_rooms() {
  ValveProblem p;
  p.flow.q_nominal = {0.1, 0.1};
  p.flow.c2 = 0.0;
  p.flow.q_min = 0.0;
  p.forced_open.clear();
  p.max_close = 2;
  p.c_q = 1e4;
  return p;
}

}  // namespace

TEST(Flow, ClosedCircuitsGiveOffset) {
  FlowModel fm = default_flow_model();
  fm.c0 = 0.01;
  EXPECT_DOUBLE_EQ(flow_from_config(std::vector<int>(11, 0), fm), 0.01);
  const double all = flow_from_config(std::vector<int>(11, 1), default_flow_model());
  EXPECT_NEAR(all, 0.44 - 0.723 * 0.44 * 0.44, 1e-12);
  EXPECT_NEAR(all, 0.3, 0.01);
}

TEST(ComfortPrices, SignConvention) {
  const auto p = comfort_prices({21.0, 20.0}, {21.0, 21.0}, 1.0);
  EXPECT_DOUBLE_EQ(p[0], 0.0);
  EXPECT_DOUBLE_EQ(p[1], -1.0);
  EXPECT_THROW(comfort_prices({21.0}, {21.0, 20.0}, 1.0), hpmpc::DomainError);
}

TEST(LinearizeProducts, Counts) {
  const ProductPlan p = linearize_products(11);
  EXPECT_EQ(p.auxiliaries, 55);
  EXPECT_EQ(p.total_binaries, 66);
  EXPECT_EQ(linearize_products(2).auxiliaries, 1);
  EXPECT_EQ(linearize_products(1).auxiliaries, 0);
}

TEST(SelectValves, HugeReferenceOpensEverything) {
  ValveProblem p;
  p.flow = default_flow_model();
  p.prices.assign(11, 0.0);
  p.q_ref = 10.0;
  const ValveDecision d = select_valves(p);
  for (int v : d.v) EXPECT_EQ(v, 1);
}

TEST(SelectValves, ColdRoomWinsTheSingleSlot) {
  ValveProblem p = two_rooms();
  p.q_ref = 0.1;  // one open circuit matches exactly
  p.prices = comfort_prices({19.0, 22.0}, {21.0, 21.0}, 1.0);
  const ValveDecision d = enumerate_valves(p);
  EXPECT_EQ(d.v, (std::vector<int>{1, 0}));
  EXPECT_EQ(d.evaluated, 4);
}

TEST(SelectValves, CloseLimitPerIteration) {
  ValveProblem p;
  p.flow = default_flow_model();
  p.prices.assign(11, 5.0);  // everyone wants to close
  p.q_ref = 0.0;
  p.max_close = 1;
  p.v_prev.assign(11, 1);
  const ValveDecision d = select_valves(p);
  int closed = 0;
  for (int v : d.v) closed += 1 - v;
  EXPECT_EQ(closed, 1);
  EXPECT_EQ(d.v[0], 1);  // the forced-open bathroom circuit
}

TEST(SelectValves, UnreachableMinimumFlowNamed) {
  ValveProblem p = two_rooms();
  p.prices = {0.0, 0.0};
  p.flow.q_min = 1.0;
  try {
    enumerate_valves(p);
    FAIL();
  } catch (const hpmpc::DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("q_min"), std::string::npos);
  }
}

TEST(SelectValves, MldMatchesEnumerationOnSmallInstances) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    ValveProblem p;
    const int m = 2 + trial % 5;
    for (int i = 0; i < m; ++i) p.flow.q_nominal.push_back(0.02 + 0.06 * u(rng));
    p.flow.q_min = 0.02;
    p.q_ref = 0.3 * u(rng);
    for (int i = 0; i < m; ++i) p.prices.push_back(2.0 * u(rng) - 1.0);
    p.max_close = 1 + trial % 3;
    const ValveDecision e = enumerate_valves(p);
    const ValveDecision mld = solve_valves_mld(p);
    EXPECT_NEAR(mld.objective, e.objective, 1e-6 * std::max(1.0, std::abs(e.objective)));
    EXPECT_NEAR(valve_objective(p, mld.v), mld.objective, 1e-6);
  }
}
