#include "hpmpc/building_model.hpp"
#include "hpmpc/numerics.hpp"
#include "hpmpc/plant_sim.hpp"
#include "hpmpc/scenario.hpp"
#include "hpmpc/supervisory_mpc.hpp"
#include "hpmpc/valve_dispatch.hpp"
#include "random_instances.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace hpmpc;

static void BM_ZohHouse(benchmark::State& state) {
  const auto ss = building::assemble_state_space(plant::reference_house());
  for (auto _ : state) {
    benchmark::DoNotOptimize(building::discretize(ss, 3600.0));
  }
}
BENCHMARK(BM_ZohHouse);

static void BM_Expm(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(1);
  std::normal_distribution<double> d(0.0, 1.0);
  numerics::Matrix a(n, n);
  for (int i = 0; i < n * n; ++i) a(i / n, i % n) = d(rng);
  for (auto _ : state) benchmark::DoNotOptimize(numerics::expm(a));
}
BENCHMARK(BM_Expm)->Arg(2)->Arg(8)->Arg(32);

static void BM_SolveQp(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(2);
  std::normal_distribution<double> d(0.0, 1.0);
  numerics::QpProblem p(n);
  numerics::Matrix l(n, n);
  for (int i = 0; i < n * n; ++i) l(i / n, i % n) = d(rng);
  p.hessian = l * l.transpose() + numerics::Matrix::Identity(n, n);
  for (int i = 0; i < n; ++i) p.gradient[i] = 5.0 * d(rng);
  p.lower.setConstant(-1.0);
  p.upper.setConstant(1.0);
  for (int r = 0; r < n; ++r) {
    numerics::SparseRow row;
    for (int i = 0; i < n; ++i) row.add(i, d(rng));
    p.add_inequality(row, numerics::Sense::LessEqual, 0.5);
  }
  for (auto _ : state) benchmark::DoNotOptimize(numerics::solve_qp(p));
}
BENCHMARK(BM_SolveQp)->Arg(10)->Arg(40)->Arg(120);

static void BM_MiocpBranchAndBound(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const auto r = testkit::random_miocp(rng, static_cast<int>(state.range(0)), 2);
  const mpc::MiocpProblem p = mpc::build_miocp(r.spec, r.x0, r.t0_hour);
  for (auto _ : state) benchmark::DoNotOptimize(mpc::solve_branch_and_bound(p, {}));
}
BENCHMARK(BM_MiocpBranchAndBound)->Arg(8)->Arg(24)->Arg(48)->Unit(benchmark::kMillisecond);

static valves::ValveProblem valve_problem() {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  valves::ValveProblem p;
  p.flow = valves::default_flow_model();
  p.q_ref = 0.2;
  for (int i = 0; i < p.flow.circuits(); ++i) p.prices.push_back(2.0 * u(rng) - 1.0);
  return p;
}

static void BM_ValveEnumeration(benchmark::State& state) {
  const auto p = valve_problem();
  for (auto _ : state) benchmark::DoNotOptimize(valves::enumerate_valves(p));
}
BENCHMARK(BM_ValveEnumeration);

static void BM_ValveMld(benchmark::State& state) {
  const auto p = valve_problem();
  for (auto _ : state) benchmark::DoNotOptimize(valves::solve_valves_mld(p));
}
BENCHMARK(BM_ValveMld)->Unit(benchmark::kMillisecond);

static void BM_ClosedLoopDay(benchmark::State& state) {
  scenario::GeneratorConfig g;
  g.days = 1;
  const scenario::Scenario sc = scenario::generate(g, 5);
  plant::RunOptions o;
  o.controller = state.range(0) == 0 ? plant::Controller::Benchmark : plant::Controller::Mpc;
  for (auto _ : state) benchmark::DoNotOptimize(plant::run_closed_loop(sc, o));
}
BENCHMARK(BM_ClosedLoopDay)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
