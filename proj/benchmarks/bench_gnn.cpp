#include <benchmark/benchmark.h>

#include <vector>

#include "ctrlgad/augmentation.hpp"
#include "ctrlgad/gnn.hpp"
#include "ctrlgad/injection.hpp"
#include "ctrlgad/rng.hpp"

namespace {

ctrlgad::AugmentedGraph weighted_fixture(std::size_t num_nodes) {
  const ctrlgad::Graph g =
      ctrlgad::symmetrize(ctrlgad::generate_clean_graph(num_nodes, 16, 4, 0.05, 0.002, 1));
  ctrlgad::Rng rng(2);
  std::vector<double> scores(num_nodes);
  for (double& s : scores) s = rng.uniform(0.4, 1.2);
  return ctrlgad::weight_edges(g, scores);
}

ctrlgad::ModelConfig model_config(ctrlgad::ConvType type) {
  ctrlgad::ModelConfig cfg;
  cfg.conv_type = type;
  cfg.hidden_dim = 32;
  cfg.layers = 2;
  return cfg;
}

void bm_forward(benchmark::State& state) {
  const auto graph = weighted_fixture(static_cast<std::size_t>(state.range(0)));
  const auto model =
      ctrlgad::build_model(model_config(ctrlgad::ConvType::weighted_gcn), 16, 1);
  for (auto _ : state) {
    auto logits = ctrlgad::forward(model, graph);
    benchmark::DoNotOptimize(logits);
  }
}
BENCHMARK(bm_forward)->Arg(200)->Arg(1000)->Arg(2708);

void bm_gradients(benchmark::State& state) {
  const auto graph = weighted_fixture(static_cast<std::size_t>(state.range(0)));
  const auto model =
      ctrlgad::build_model(model_config(ctrlgad::ConvType::weighted_gcn), 16, 1);
  for (auto _ : state) {
    auto grads = ctrlgad::parameter_gradients(model, graph, graph.base.labels, {}, 1.0);
    benchmark::DoNotOptimize(grads);
  }
}
BENCHMARK(bm_gradients)->Arg(200)->Arg(1000)->Arg(2708);

void bm_train_epochs(benchmark::State& state) {
  auto graph = weighted_fixture(500);
  for (std::size_t i = 0; i < graph.base.num_nodes; i += 20) graph.base.labels[i] = 1;
  ctrlgad::TrainConfig tcfg;
  tcfg.epochs = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    auto result =
        ctrlgad::train(graph, model_config(ctrlgad::ConvType::weighted_gcn), tcfg, 0);
    benchmark::DoNotOptimize(result.loss_trace);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(bm_train_epochs)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
