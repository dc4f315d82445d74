#include <benchmark/benchmark.h>

#include <random>

#include "tpinn/losses.h"
#include "tpinn/moc.h"

namespace {

using namespace tpinn;

CollocationSet random_set(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(0.0, 50'000.0), ut(0.0, 600.0), up(0.5, 1.5);
  CollocationSet s;
  for (std::size_t k = 0; k < n; ++k) {
    s.xf.push_back(ux(rng));
    s.tf.push_back(ut(rng));
    s.boundary.push_back({k % 2 ? 50'000.0 : 0.0, ut(rng), up(rng), 0.87});
    s.initial.push_back({ux(rng), 0.0, up(rng), 0.87});
  }
  return s;
}

NetSpec default_net() {
  NetSpec spec;
  spec.scaler = {0.0, 50'000.0, 0.0, 600.0};
  return spec;
}

void BM_CoupledLossGradient(benchmark::State& state) {
  const NetSpec spec = default_net();
  const NetParams params = init_params(spec, 1);
  const CollocationSet batch = random_set(static_cast<std::size_t>(state.range(0)), 2);
  const PhysicsCoeffs c = PhysicsCoeffs::from(FluidSpec{}, PipelineSpec{});
  const Objective obj = Objective::coupled(LossWeights{}, BcLossForm::Paper);
  Gradients g;
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluate_objective(spec, params, c, batch, obj, &g).total);
  }
}
BENCHMARK(BM_CoupledLossGradient)->Arg(32)->Arg(128)->Unit(benchmark::kMicrosecond);

void BM_CoupledLossValue(benchmark::State& state) {
  const NetSpec spec = default_net();
  const NetParams params = init_params(spec, 1);
  const CollocationSet batch = random_set(static_cast<std::size_t>(state.range(0)), 2);
  const PhysicsCoeffs c = PhysicsCoeffs::from(FluidSpec{}, PipelineSpec{});
  const Objective obj = Objective::coupled(LossWeights{}, BcLossForm::Paper);
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluate_objective(spec, params, c, batch, obj).total);
  }
}
BENCHMARK(BM_CoupledLossValue)->Arg(32)->Arg(128)->Unit(benchmark::kMicrosecond);

void BM_MocRun(benchmark::State& state) {
  Scenario s;
  s.inlet_pressure = Signal::constant(1.48);
  s.outlet_flowrate = Signal({{0.0, m3h_to_m3s(154.0)}, {60.0, m3h_to_m3s(140.0)}});
  s.duration = 600.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run(s, 0.1).nt());
  }
}
BENCHMARK(BM_MocRun)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
