#include <benchmark/benchmark.h>

#include "acal/bench.hpp"
#include "acal/config.hpp"
#include "acal/document.hpp"
#include "acal/pipeline.hpp"
#include "acal/relations.hpp"

namespace {

const std::filesystem::path kData = ACAL_TEST_DATA_DIR;

// Whole replayed case: retrieval, prompts, digests, fixture reads, solver.
void BM_ReplayCase(benchmark::State& state) {
  auto config = acal::load_config(kData / "e2e" / "config.json");
  config.clash_resolution_enabled = state.range(0) != 0;
  const auto input = acal::document_as<acal::TaskInput>(acal::read_document(kData / "e2e" / "input.json"));
  const auto res = acal::make_resources(config);
  for (auto _ : state) {
    benchmark::DoNotOptimize(acal::run_case(input, config, res, [] { return std::string{}; }).strengths.claim());
  }
}
BENCHMARK(BM_ReplayCase)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_ReplayMicroTask(benchmark::State& state) {
  const auto config = acal::load_config(kData / "micro" / "config.json");
  const auto task = acal::task_definition("hearsay");
  const auto examples = acal::load_task(kData / "micro" / "hearsay.tsv", task);
  const auto res = acal::make_resources(config);
  acal::BenchmarkOptions options;
  options.workers = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    auto points = acal::run_benchmark(task, examples, config, acal::single_point(), res, options);
    benchmark::DoNotOptimize(points.front().report.macro_f1);
  }
}
BENCHMARK(BM_ReplayMicroTask)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_PlanBatches(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(acal::plan_batches(static_cast<std::size_t>(state.range(0)), 10).pair_count());
}
BENCHMARK(BM_PlanBatches)->Arg(12)->Arg(60);

}  // namespace
