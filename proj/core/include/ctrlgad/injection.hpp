#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ctrlgad/graph.hpp"

namespace ctrlgad {

struct InjectionConfig {
  std::size_t m = 5;    // nodes per anomaly group
  std::size_t n = 10;   // number of groups
  double p = 0.0;       // structural mode: each missing intra-group pair is wired with probability 1 - p
  std::size_t q = 50;   // contextual mode: candidate pool size
  std::uint64_t seed = 0;
};

struct InjectionOutcome {
  Graph graph;
  std::vector<std::size_t> selected_nodes;  // the m*n injected nodes, ascending
  std::size_t new_edges = 0;                // undirected connections added (structural only)
};

/// Picks m*n currently-benign nodes, splits them into n groups of m, and
/// wires each non-adjacent intra-group pair bidirectionally with probability
/// 1 - p. Selected nodes are labeled anomalous; features are untouched.
InjectionOutcome inject_structural(const Graph& g, const InjectionConfig& cfg);

/// Picks m*n currently-benign nodes V_c. For each, samples q candidates from
/// the remaining nodes and copies the feature row of the most Euclidean-
/// distant candidate (ties break toward the lowest node id). Selected nodes
/// are labeled anomalous; edges are untouched.
InjectionOutcome inject_contextual(const Graph& g, const InjectionConfig& cfg);

/// Planted-partition graph with community-correlated Gaussian features and
/// all-zero labels. Node i joins community i mod communities; each pair is
/// wired bidirectionally with probability intra_p inside a community and
/// inter_p across. Feature rows are the community mean (entries drawn from
/// N(0, 1)) plus N(0, feature_noise^2) noise. Deterministic per seed.
Graph generate_clean_graph(std::size_t num_nodes, std::size_t feature_dim,
                           std::size_t communities, double intra_p, double inter_p,
                           std::uint64_t seed, double feature_noise = 0.3);

}  // namespace ctrlgad
