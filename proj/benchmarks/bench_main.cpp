#include "kgreedy/greedy.hpp"
#include "kgreedy/radon_data.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace kgreedy;

const Kernel kKernel = Kernel::weighted_gaussian(2000, 1.5);

void BM_RadonPairing(benchmark::State& state) {
  PairingEngine engine(kKernel);
  engine.set_cache_enabled(false);
  const CandidateSet gamma = sample_functionals(shepp_logan(), 256, 1);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(engine.pairing(gamma.functional(i % 256), gamma.functional((i * 7 + 3) % 256)));
    ++i;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_RadonPairing);

void BM_RadonRepresenter(benchmark::State& state) {
  const PairingEngine engine(kKernel);
  const Functional line = Functional::radon(0.2, 0.7);
  const Point x = make_point(0.1, -0.3);
  for (auto _ : state) benchmark::DoNotOptimize(engine.representer(line, x));
}
BENCHMARK(BM_RadonRepresenter);

void BM_QuadraturePairing(benchmark::State& state) {
  PairingEngine engine(kKernel, PairingMode::Quadrature);
  engine.set_cache_enabled(false);
  const Functional a = Functional::radon(0.2, 0.7);
  const Functional b = Functional::radon(-0.4, 2.1);
  for (auto _ : state) benchmark::DoNotOptimize(engine.pairing(a, b));
}
BENCHMARK(BM_QuadraturePairing)->Unit(benchmark::kMillisecond);

// One extend_candidate on a model that already holds range(1) functionals.
void BM_GreedyStep(benchmark::State& state) {
  PairingEngine engine(kKernel);
  engine.set_cache_enabled(false);
  const CandidateSet gamma = sample_functionals(shepp_logan(), 2000, 42);
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    state.PauseTiming();
    NewtonModel model(engine, gamma);
    for (std::size_t k = 0; k < n; ++k) model.extend_candidate(k);
    state.ResumeTiming();
    model.extend_candidate(n);
    benchmark::DoNotOptimize(model.max_abs_candidate_residual());
  }
}
BENCHMARK(BM_GreedyStep)->Arg(10)->Arg(100)->Arg(300)->Unit(benchmark::kMicrosecond);

void BM_GreedyRun(benchmark::State& state) {
  PairingEngine engine(kKernel);
  engine.set_cache_enabled(false);
  const CandidateSet gamma = sample_functionals(shepp_logan(), static_cast<std::size_t>(state.range(0)), 42);
  for (auto _ : state) {
    const GreedyResult r = run_greedy(SelectionRule::psr_greedy(), engine, gamma, 100);
    benchmark::DoNotOptimize(r.model.norm_squared());
  }
}
BENCHMARK(BM_GreedyRun)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_PhantomRadon(benchmark::State& state) {
  const EllipsePhantom sl = shepp_logan();
  double r = -1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sl.radon(r, 0.3));
    r = r > 1.0 ? -1.0 : r + 1e-3;
  }
}
BENCHMARK(BM_PhantomRadon);

}  // namespace

BENCHMARK_MAIN();
