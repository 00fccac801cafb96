#include <benchmark/benchmark.h>

#include "qubot/mcwf.hpp"
#include "qubot/potentials.hpp"

using namespace qubot;

static void BM_SmmcStep(benchmark::State& state) {
  SimParams p;
  p.fock_dim = static_cast<int>(state.range(0));
  const SmmcEngine engine(p);
  StreamRng rng(1, 0);
  SmmcState s = initial_state(p);
  double t = 0.0;
  for (auto _ : state) {
    engine.step(s, t, rng, nullptr);
    t += p.dt;
  }
}
BENCHMARK(BM_SmmcStep)->Arg(32)->Arg(48);

static void BM_Trajectory(benchmark::State& state) {
  const SimParams p;
  const SmmcEngine engine(p);
  std::uint64_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(engine.run(20240611, i++));
}
BENCHMARK(BM_Trajectory)->Unit(benchmark::kMillisecond);

static void BM_NoJumpPropagator(benchmark::State& state) {
  SimParams p;
  p.fock_dim = static_cast<int>(state.range(0));
  const auto H = motion_hamiltonian(0.30, p);
  for (auto _ : state) benchmark::DoNotOptimize(no_jump_propagator(H, p.kappa, 0.1, p.dt));
}
BENCHMARK(BM_NoJumpPropagator)->Arg(16)->Arg(32)->Arg(64);

static void BM_SpinPattern(benchmark::State& state) {
  const auto R = log_grid(0.2, 6.0, static_cast<int>(state.range(0)));
  const auto params = paper_main_dressing();
  for (auto _ : state) benchmark::DoNotOptimize(spin_pattern(R, params));
}
BENCHMARK(BM_SpinPattern)->Arg(2000)->Arg(20000);

static void BM_Landscape(benchmark::State& state) {
  const auto pattern = spin_pattern(log_grid(0.2, 6.0, 2000), paper_main_dressing());
  const auto trap = paper_main_trap();
  for (auto _ : state) benchmark::DoNotOptimize(landscape(pattern, trap));
}
BENCHMARK(BM_Landscape)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
