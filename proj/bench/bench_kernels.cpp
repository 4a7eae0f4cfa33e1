// Kernel timings: serial vs OpenMP exhaustive search, selector cost at full
// geometry, and benchmark sweep throughput by worker count.

#include <benchmark/benchmark.h>

#include <vector>

#include "partimax/coverage.hpp"
#include "partimax/select.hpp"
#include "partimax/simulate.hpp"
#include "partimax/verify.hpp"

namespace {

using namespace partimax;

const TileCoding& full_coder() {
  static const TileCoding coder({5120, 3840, 180, 180, 60, 30});
  return coder;
}

// Five people's worth of clustered particles.
std::vector<State> pooled_belief(const TileCoding& coder, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<State> ps;
  for (int p = 0; p < 5; ++p) {
    const auto one = clustered_particles(coder, 250, rng);
    ps.insert(ps.end(), one.begin(), one.end());
  }
  return ps;
}

void BM_ExhaustSerial(benchmark::State& state) {
  const TileCoding coder(small_overlapping_geometry());
  Rng rng(1);
  const auto ps = clustered_particles(coder, 50, rng);
  for (auto _ : state)
    benchmark::DoNotOptimize(exhaust_max_serial(ps, coder, static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_ExhaustSerial)->Arg(3)->Arg(4)->Arg(5);

void BM_ExhaustParallel(benchmark::State& state) {
  const TileCoding coder(small_overlapping_geometry());
  Rng rng(1);
  const auto ps = clustered_particles(coder, 50, rng);
  for (auto _ : state)
    benchmark::DoNotOptimize(exhaust_max(ps, coder, static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_ExhaustParallel)->Arg(3)->Arg(4)->Arg(5);

void BM_TableInitialize(benchmark::State& state) {
  const auto ps = pooled_belief(full_coder(), 2);
  GainTable table(full_coder());
  for (auto _ : state) {
    table.initialize(ps);
    benchmark::DoNotOptimize(table.uncovered());
  }
}
BENCHMARK(BM_TableInitialize);

void BM_Covers(benchmark::State& state) {
  const auto ps = pooled_belief(full_coder(), 2);
  std::vector<BoxIndex> out(full_coder().tilings());
  for (auto _ : state)
    for (const State& s : ps) {
      full_coder().covers(s.x, s.y, out);
      benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK(BM_Covers);

void BM_Greedy(benchmark::State& state) {
  const auto ps = pooled_belief(full_coder(), 3);
  GainTable table(full_coder());
  for (auto _ : state) benchmark::DoNotOptimize(greedy_max(ps, 40, table));
}
BENCHMARK(BM_Greedy);

void BM_StochasticGreedy(benchmark::State& state) {
  const auto ps = pooled_belief(full_coder(), 3);
  GainTable table(full_coder());
  std::uint64_t seed = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(stochastic_greedy_max(ps, SelectorParams{40, 10, ++seed, 0}, table));
}
BENCHMARK(BM_StochasticGreedy);

void BM_PartiMax(benchmark::State& state) {
  const auto ps = pooled_belief(full_coder(), 3);
  GainTable table(full_coder());
  std::uint64_t seed = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(
        partimax::partimax(ps, SelectorParams{40, static_cast<std::size_t>(state.range(0)), ++seed, 0}, table));
}
BENCHMARK(BM_PartiMax)->Arg(10)->Arg(100);

void BM_Sweep(benchmark::State& state) {
  BenchmarkConfig c;
  c.geometry = {2000, 1500, 180, 180, 60, 30};
  c.algorithms = {Algorithm::greedy, Algorithm::partimax};
  c.people = {1, 3};
  c.seeds = {1, 2, 3, 4};
  c.timesteps = 20;
  c.jobs = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_benchmark(c));
}
BENCHMARK(BM_Sweep)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
