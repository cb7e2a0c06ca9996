#include "hpmpc/error.hpp"
#include "hpmpc/supervisory_mpc.hpp"
#include "random_instances.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace hpmpc;
using namespace hpmpc::mpc;

namespace {

// Evaluates the encoded down-time rows on a pure delta pattern.
bool rows_admit(int n, int m, int delta_prev, int off_steps, const std::vector<int>& d) {
  numerics::QpProblem qp(5 * n);
  std::vector<std::string> fam;
  Layout l{n};
  encode_downtime(qp, fam, l, m, delta_prev, off_steps);
  numerics::Vector x = numerics::Vector::Zero(5 * n);
  for (int k = 0; k < n; ++k) x[l.delta(k)] = d[k];
  for (std::size_t i = 0; i < qp.in_rows.size(); ++i) {
    const double v = qp.in_rows[i].dot(x);
    const bool ok = qp.in_sense[i] == numerics::Sense::LessEqual ? v <= qp.in_rhs[i] + 1e-12
                                                                 : v >= qp.in_rhs[i] - 1e-12;
    if (!ok) return false;
  }
  return true;
}

MiocpSpec flat_spec(int n) {
  std::mt19937_64 rng(1);
  MiocpSpec s = testkit::random_miocp(rng, n, 2).spec;
  s.delta_op = 1;
  s.fit = efficiency::reference_fit();
  s.delta_prev = 0;
  s.p_prev_kw = 0.0;
  s.off_steps = 100;
  return s;
}

}  // namespace

TEST(DownTime, StopRestartInsideWindowRejected) {
  EXPECT_FALSE(rows_admit(3, 3, 0, 100, {1, 0, 1}));
  EXPECT_TRUE(rows_admit(3, 3, 0, 100, {1, 1, 0}));
  EXPECT_TRUE(rows_admit(4, 2, 0, 100, {1, 0, 0, 1}));
  EXPECT_FALSE(downtime_feasible({1, 0, 1}, 3, 0, 100));
}

TEST(DownTime, UnitWindowIsUnrestricted) {
  for (int mask = 0; mask < 64; ++mask) {
    std::vector<int> d(6);
    for (int k = 0; k < 6; ++k) d[k] = (mask >> k) & 1;
    EXPECT_TRUE(rows_admit(6, 1, 1, 0, d));
  }
}

TEST(DownTime, InitialConditionForcesOff) {
  // Stopped one step ago with M = 3: two more steps off.
  EXPECT_FALSE(rows_admit(4, 3, 0, 1, {0, 1, 0, 0}));
  EXPECT_TRUE(rows_admit(4, 3, 0, 1, {0, 0, 1, 1}));
  // Running before the horizon: stopping at step 0 starts a window.
  EXPECT_FALSE(rows_admit(4, 3, 1, 0, {0, 1, 0, 0}));
  EXPECT_TRUE(rows_admit(4, 3, 1, 0, {0, 0, 0, 1}));
}

TEST(DownTime, RowsMatchPatternChecker) {
  for (int m = 1; m <= 4; ++m) {
    for (int prev = 0; prev <= 1; ++prev) {
      for (int off = 0; off <= 4; ++off) {
        for (int mask = 0; mask < 256; ++mask) {
          std::vector<int> d(8);
          for (int k = 0; k < 8; ++k) d[k] = (mask >> k) & 1;
          ASSERT_EQ(rows_admit(8, m, prev, off, d), downtime_feasible(d, m, prev, off));
        }
      }
    }
  }
}

TEST(GatedRange, OffForcesZeroOnForcesRange) {
  numerics::QpProblem qp(10);
  std::vector<std::string> fam;
  Layout l{2};
  encode_gated_range(qp, fam, l, 0.2, 2.5);
  auto admits = [&](double p, int d) {
    numerics::Vector x = numerics::Vector::Zero(10);
    x[l.p(0)] = p;
    x[l.delta(0)] = d;
    for (std::size_t i = 0; i < qp.in_rows.size(); ++i) {
      const double v = qp.in_rows[i].dot(x);
      if (qp.in_sense[i] == numerics::Sense::LessEqual ? v > qp.in_rhs[i] + 1e-12
                                                       : v < qp.in_rhs[i] - 1e-12) {
        return false;
      }
    }
    return true;
  };
  EXPECT_TRUE(admits(0.0, 0));
  EXPECT_FALSE(admits(0.1, 0));
  EXPECT_FALSE(admits(0.1, 1));
  EXPECT_TRUE(admits(0.2, 1));
  EXPECT_TRUE(admits(2.5, 1));
  EXPECT_FALSE(admits(2.6, 1));
  EXPECT_EQ(fam.front(), "gated-range");
}

TEST(EfficiencyCuts, EnvelopeIsTight) {
  const MiocpSpec s = flat_spec(4);
  const CutFamily c = efficiency_cuts(s);
  ASSERT_EQ(c.per_step.size(), 4u);
  EXPECT_EQ(static_cast<int>(c.per_step[0].size()), s.cuts);
  EXPECT_LT(c.max_gap_fraction, 0.02);
}

TEST(BuildMiocp, RejectsBuyNotAboveSell) {
  MiocpSpec s = flat_spec(3);
  s.sell[1] = s.buy[1];
  EXPECT_THROW(build_miocp(s, {21.0, 24.0}, 0), ConfigError);
  MiocpSpec t = flat_spec(3);
  t.t_ref.pop_back();
  EXPECT_THROW(build_miocp(t, {21.0, 24.0}, 0), ConfigError);
}

TEST(Solve, NoComfortIncentiveMeansNoHeating) {
  MiocpSpec s = flat_spec(6);
  for (int k = 0; k < 6; ++k) {
    s.c_cmf[k] = 0.0;
    s.t_min[k] = -50.0;
    s.t_max[k] = 80.0;
  }
  const MiocpSolution sol = solve_branch_and_bound(build_miocp(s, {21.0, 24.0}, 0));
  ASSERT_EQ(sol.status, SolveStatus::Optimal);
  for (int d : sol.delta) EXPECT_EQ(d, 0);
  for (double q : heat_budget(sol)) EXPECT_EQ(q, 0.0);
}

TEST(Solve, UnreachableComfortUsesSlack) {
  MiocpSpec s = flat_spec(4);
  for (int k = 0; k < 4; ++k) {
    s.t_min[k] = 35.0;
    s.t_max[k] = 36.0;
  }
  const MiocpSolution sol = solve_branch_and_bound(build_miocp(s, {21.0, 24.0}, 0));
  ASSERT_NE(sol.status, SolveStatus::Infeasible);
  const ValidationReport v = validate_solution(s, {21.0, 24.0}, sol);
  EXPECT_TRUE(v.ok);
  EXPECT_TRUE(v.slack_binding);
}

TEST(Solve, BranchAndBoundMatchesEnumeration) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    const testkit::RandomMiocp r = testkit::random_miocp(rng, 6, 2);
    const MiocpProblem p = build_miocp(r.spec, r.x0, r.t0_hour);
    SolveOptions o;
    o.relative_gap = 1e-9;
    const MiocpSolution bb = solve_branch_and_bound(p, o);
    const MiocpSolution ex = enumerate_exact(p);
    ASSERT_EQ(bb.status, SolveStatus::Optimal);
    EXPECT_NEAR(bb.objective, ex.objective, 1e-6 * std::max(1.0, std::abs(ex.objective)))
        << "trial " << trial;
    EXPECT_TRUE(validate_solution(r.spec, r.x0, bb).ok) << "trial " << trial;
  }
}

TEST(Validator, DetectsTamperedSchedule) {
  std::mt19937_64 rng(8);
  testkit::RandomMiocp r = testkit::random_miocp(rng, 5, 3);
  r.spec.delta_prev = 0;
  r.spec.off_steps = 100;
  r.spec.p_prev_kw = 0.0;
  MiocpSolution sol = solve_branch_and_bound(build_miocp(r.spec, r.x0, r.t0_hour));
  // Force an illegal on/off/on pattern at full power.
  for (int k : {0, 2}) {
    sol.delta[k] = 1;
    sol.p_kw[k] = r.spec.p_min_kw;
  }
  sol.delta[1] = 0;
  sol.p_kw[1] = 0.0;
  const ValidationReport v = validate_solution(r.spec, r.x0, sol);
  EXPECT_FALSE(v.ok);
  bool downtime = false;
  for (const auto& vi : v.violations) downtime = downtime || vi.family == "down-time";
  EXPECT_TRUE(downtime);
}

TEST(HeatBudget, WattHoursPerStep) {
  MiocpSolution s;
  s.q_kw = {0.0, 1.25, -1e-12};
  const auto b = heat_budget(s);
  ASSERT_EQ(b.size(), 3u);
  EXPECT_DOUBLE_EQ(b[1], 1250.0);
  EXPECT_EQ(b[2], 0.0);
}
