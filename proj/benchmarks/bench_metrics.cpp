#include <benchmark/benchmark.h>

#include <random>

#include "acal/bench.hpp"

namespace {

void BM_Evaluate(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::bernoulli_distribution coin(0.5);
  const std::vector<std::string> labels{"yes", "no"};
  std::vector<std::string> pred, gold;
  for (int i = 0; i < state.range(0); ++i) {
    pred.push_back(labels[coin(rng)]);
    gold.push_back(labels[coin(rng)]);
  }
  for (auto _ : state) benchmark::DoNotOptimize(acal::evaluate(pred, gold, labels).macro_f1);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Evaluate)->Arg(100)->Arg(1000)->Arg(10000);

}  // namespace
