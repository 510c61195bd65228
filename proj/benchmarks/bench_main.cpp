#include <benchmark/benchmark.h>

#include "evobed/experiment.hpp"
#include "evobed/supervisor.hpp"

using namespace evobed;

namespace {

GainSet bench_gains() {
  GainSet g;
  g[Dof::Roll] = {8.0, 0.3, 1.5};
  g[Dof::Pitch] = {8.0, 0.3, 1.5};
  g[Dof::Yaw] = {6.0, 2.0, 2.2};
  g[Dof::Height] = {22.0, 0.3, 3.0};
  g[Dof::North] = {0.8, 0.25, 0.4};
  g[Dof::East] = {0.8, 0.25, 0.4};
  return g;
}

void BM_DynamicsStep(benchmark::State& state) {
  VehicleParams params;
  VehicleState s;
  s.h = 0.15;
  std::array<double, kNumMotors> pwm;
  pwm.fill(params.hover_pwm());
  Vec3 wind{3.0, 2.0, 0.0};
  for (auto _ : state) {
    s = step(s, pwm, wind, params, 0.004);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_DynamicsStep);

void BM_CycleFitness(benchmark::State& state) {
  SensedState sensed;
  sensed.p_n = 0.03;
  sensed.h = 0.18;
  Waypoint sp{0.0, 0.0, 0.2, 40.0};
  FitnessLimits limits;
  for (auto _ : state) {
    FitnessBreakdown b = cycle_fitness(sensed, sp, 1.0, -0.5, 0, limits);
    benchmark::DoNotOptimize(b);
  }
}
BENCHMARK(BM_CycleFitness);

void BM_FullTrial(benchmark::State& state) {
  ExperimentSetup setup;
  TrialContext ctx = setup.ose_context();
  GainSet gains = bench_gains();
  std::uint64_t seed = 0;
  for (auto _ : state) {
    TrialOutcome o = run_trial(gains, ctx, Seed{seed++});
    benchmark::DoNotOptimize(o);
  }
}
BENCHMARK(BM_FullTrial)->Unit(benchmark::kMillisecond);

void BM_Evaluation(benchmark::State& state) {
  ExperimentSetup setup;
  TrialContext ctx = setup.ose_context();
  GainSet gains = bench_gains();
  std::uint64_t seed = 0;
  for (auto _ : state) {
    EvalResult r = evaluate(gains, ctx, Seed{seed++});
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_Evaluation)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
