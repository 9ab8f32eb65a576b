#include <benchmark/benchmark.h>

#include <random>

#include "acal/qbaf.hpp"
#include "oracles.hpp"

namespace {

void BM_SolveStar(benchmark::State& state) {
  std::vector<double> sup(static_cast<std::size_t>(state.range(0)), 0.7);
  std::vector<double> att(static_cast<std::size_t>(state.range(0)), 0.4);
  const auto g = oracle::star(sup, att);
  for (auto _ : state) benchmark::DoNotOptimize(acal::solve_equilibrium(g).claim());
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SolveStar)->RangeMultiplier(4)->Range(1, 256)->Complexity();

// Fully connected bidirectional graphs: the worst case the pipeline builds.
void BM_SolveDenseCyclic(benchmark::State& state) {
  std::mt19937_64 rng(17);
  const auto g = oracle::random_cyclic(rng, static_cast<int>(state.range(0)), 1.0);
  std::size_t iterations = 0;
  for (auto _ : state) {
    const auto s = acal::solve_equilibrium(g);
    iterations = s.iterations;
    benchmark::DoNotOptimize(s.claim());
  }
  state.counters["iterations"] = static_cast<double>(iterations);
  state.counters["edges"] = static_cast<double>(g.edges.size());
}
BENCHMARK(BM_SolveDenseCyclic)->DenseRange(4, 24, 4);

void BM_Validate(benchmark::State& state) {
  std::mt19937_64 rng(5);
  const auto g = oracle::random_cyclic(rng, static_cast<int>(state.range(0)), 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(acal::validate(g).size());
}
BENCHMARK(BM_Validate)->Arg(8)->Arg(32);

}  // namespace
