#include <benchmark/benchmark.h>

#include <vector>

#include "ctrlgad/metrics.hpp"
#include "ctrlgad/rng.hpp"

namespace {

ctrlgad::RankedScores ranked_fixture(std::size_t n) {
  ctrlgad::Rng rng(7);
  ctrlgad::RankedScores r;
  r.scores.resize(n);
  r.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    r.scores[i] = rng.uniform();
    r.labels[i] = rng.bernoulli(0.05) ? 1 : 0;
  }
  r.labels[0] = 1;  // both classes guaranteed
  r.labels[1] = 0;
  return r;
}

void bm_auroc(benchmark::State& state) {
  const auto r = ranked_fixture(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(ctrlgad::auroc(r));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(bm_auroc)->Range(1 << 10, 1 << 18)->Complexity(benchmark::oNLogN);

void bm_auprc(benchmark::State& state) {
  const auto r = ranked_fixture(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(ctrlgad::auprc(r));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(bm_auprc)->Range(1 << 10, 1 << 18)->Complexity(benchmark::oNLogN);

void bm_rec_at_k(benchmark::State& state) {
  const auto r = ranked_fixture(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(ctrlgad::rec_at_k(r));
}
BENCHMARK(bm_rec_at_k)->Range(1 << 10, 1 << 18);

}  // namespace

BENCHMARK_MAIN();
