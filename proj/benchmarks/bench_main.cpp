#include "xflow/dual_graph.hpp"
#include "xflow/normalizer.hpp"
#include "xflow/parser.hpp"
#include "xflow/synthetic.hpp"
#include "xflow/trainer.hpp"
#include "xflow/xfg.hpp"

#include <benchmark/benchmark.h>

using namespace xflow;

namespace {

IrModule module_of(std::size_t statements) {
  return *parse_module(synthetic_module_of_size(statements, 3), "bench.ll").module;
}

void BM_BuildXfg(benchmark::State &state) {
  auto m = module_of(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(build_xfg(m));
  state.SetComplexityN(state.range(0));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BuildXfg)->RangeMultiplier(4)->Range(1 << 10, 1 << 16)->Complexity();

void BM_Normalize(benchmark::State &state) {
  auto m = module_of(4096);
  for (auto _ : state)
    benchmark::DoNotOptimize(NormalizedModule(m));
  state.SetItemsProcessed(state.iterations() * 4096);
}
BENCHMARK(BM_Normalize);

void BM_ContextPairs(benchmark::State &state) {
  auto m = module_of(2048);
  auto g = dual_graph(build_xfg(m));
  for (auto _ : state)
    benchmark::DoNotOptimize(context_pairs(g, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_ContextPairs)->DenseRange(1, 3);

void BM_TrainerStep(benchmark::State &state) {
  auto obj = static_cast<Objective>(state.range(0));
  const std::uint32_t V = 2000, D = 200;
  auto params = SkipGramParams::initialize(V, D, 1);
  std::vector<std::uint64_t> counts(V, 10);
  NegativeSampler sampler(counts);
  TrainConfig cfg;
  cfg.objective = obj;
  Rng rng(4);
  std::vector<Example> batch;
  for (int i = 0; i < 512; ++i)
    batch.push_back({static_cast<std::uint32_t>(uniform_below(rng, V)),
                     static_cast<std::uint32_t>(uniform_below(rng, V)),
                     sampler.draw_excluding(rng, cfg.negatives, 0)});
  for (auto _ : state)
    benchmark::DoNotOptimize(loss_and_gradient(batch, params, cfg, &sampler));
  state.SetLabel(std::string(to_string(obj)));
}
BENCHMARK(BM_TrainerStep)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
