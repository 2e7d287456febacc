#include <benchmark/benchmark.h>

#include "ctrlgad/controllability.hpp"
#include "ctrlgad/graph.hpp"
#include "ctrlgad/injection.hpp"

namespace {

ctrlgad::Graph community_graph(std::size_t num_nodes) {
  return ctrlgad::generate_clean_graph(num_nodes, 1, 4, 0.05, 0.002, 1);
}

void bm_recurrence(benchmark::State& state) {
  const auto g = community_graph(static_cast<std::size_t>(state.range(0)));
  ctrlgad::ControllabilityConfig cfg;
  cfg.backend = ctrlgad::ControllabilityConfig::Backend::recurrence;
  for (auto _ : state) {
    auto result = ctrlgad::average_controllability(g, cfg);
    benchmark::DoNotOptimize(result.scores);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(bm_recurrence)->Arg(50)->Arg(100)->Arg(200)->Complexity();

void bm_spectral(benchmark::State& state) {
  const auto g = community_graph(static_cast<std::size_t>(state.range(0)));
  ctrlgad::ControllabilityConfig cfg;
  cfg.backend = ctrlgad::ControllabilityConfig::Backend::spectral;
  for (auto _ : state) {
    auto result = ctrlgad::average_controllability(g, cfg);
    benchmark::DoNotOptimize(result.scores);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(bm_spectral)->Arg(50)->Arg(200)->Arg(800)->Complexity();

void bm_gramian_oracle(benchmark::State& state) {
  const auto g = community_graph(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto w = ctrlgad::gramian_oracle(g);
    benchmark::DoNotOptimize(w);
  }
}
BENCHMARK(bm_gramian_oracle)->Arg(20)->Arg(40)->Arg(80)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
