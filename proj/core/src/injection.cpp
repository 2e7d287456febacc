#include "ctrlgad/injection.hpp"

#include <algorithm>
#include <string>
#include <utility>

#include "ctrlgad/errors.hpp"
#include "ctrlgad/rng.hpp"

namespace ctrlgad {
namespace {

std::vector<std::size_t> benign_nodes(const Graph& g) {
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < g.num_nodes; ++i)
    if (g.labels[i] == 0) pool.push_back(i);
  return pool;
}

/// m*n distinct benign nodes in draw order; groups are consecutive chunks.
std::vector<std::size_t> pick_targets(const Graph& g, const InjectionConfig& cfg,
                                      Rng& rng, const char* mode) {
  const std::size_t need = cfg.m * cfg.n;
  if (need > g.num_nodes / 2)
    throw ConfigError(std::string(mode) + " injection: m*n = " + std::to_string(need) +
                      " exceeds half the node count (" + std::to_string(g.num_nodes) + ")");
  const auto pool = benign_nodes(g);
  if (pool.size() < need)
    throw ConfigError(std::string(mode) + " injection: only " + std::to_string(pool.size()) +
                      " benign nodes available for " + std::to_string(need) + " injections");
  std::vector<std::size_t> targets;
  targets.reserve(need);
  for (std::size_t idx : rng.sample_indices(pool.size(), need)) targets.push_back(pool[idx]);
  return targets;
}

}  // namespace

InjectionOutcome inject_structural(const Graph& g, const InjectionConfig& cfg) {
  if (cfg.m < 2) throw ConfigError("structural injection: group size m must be at least 2");
  if (cfg.n < 1) throw ConfigError("structural injection: group count n must be at least 1");
  if (cfg.p < 0.0 || cfg.p > 1.0)
    throw ConfigError("structural injection: p must lie in [0, 1]");

  Rng rng(cfg.seed);
  const auto targets = pick_targets(g, cfg, rng, "structural");

  std::vector<Edge> edges = g.edges;
  std::vector<int> labels = g.labels;
  std::size_t added = 0;
  for (std::size_t group = 0; group < cfg.n; ++group) {
    std::vector<std::size_t> members(targets.begin() + static_cast<std::ptrdiff_t>(group * cfg.m),
                                     targets.begin() + static_cast<std::ptrdiff_t>((group + 1) * cfg.m));
    std::sort(members.begin(), members.end());
    for (std::size_t i = 0; i < members.size(); ++i) {
      for (std::size_t j = i + 1; j < members.size(); ++j) {
        if (g.has_edge(members[i], members[j]) || g.has_edge(members[j], members[i])) continue;
        if (!rng.bernoulli(1.0 - cfg.p)) continue;
        edges.push_back({members[i], members[j]});
        edges.push_back({members[j], members[i]});
        ++added;
      }
    }
  }
  for (std::size_t v : targets) labels[v] = 1;

  InjectionOutcome out;
  out.graph = make_graph(g.num_nodes, std::move(edges), g.features, std::move(labels));
  out.graph.directed = g.directed;
  out.selected_nodes = targets;
  std::sort(out.selected_nodes.begin(), out.selected_nodes.end());
  out.new_edges = added;
  return out;
}

InjectionOutcome inject_contextual(const Graph& g, const InjectionConfig& cfg) {
  if (cfg.m < 1) throw ConfigError("contextual injection: group size m must be at least 1");
  if (cfg.n < 1) throw ConfigError("contextual injection: group count n must be at least 1");
  if (cfg.q < 1) throw ConfigError("contextual injection: candidate pool q must be at least 1");
  if (g.feature_dim() == 0)
    throw PreconditionError("contextual injection: graph has no node features");

  const std::size_t need = cfg.m * cfg.n;
  if (cfg.q > g.num_nodes - need)
    throw ConfigError("contextual injection: q = " + std::to_string(cfg.q) +
                      " exceeds the " + std::to_string(g.num_nodes - need) +
                      " nodes outside the injected set");

  Rng rng(cfg.seed);
  const auto targets = pick_targets(g, cfg, rng, "contextual");

  std::vector<bool> in_vc(g.num_nodes, false);
  for (std::size_t v : targets) in_vc[v] = true;
  std::vector<std::size_t> rest;  // V_r: every node outside V_c, ascending
  rest.reserve(g.num_nodes - need);
  for (std::size_t i = 0; i < g.num_nodes; ++i)
    if (!in_vc[i]) rest.push_back(i);

  std::vector<std::size_t> ordered_targets = targets;
  std::sort(ordered_targets.begin(), ordered_targets.end());

  Eigen::MatrixXd features = g.features;
  std::vector<int> labels = g.labels;
  for (std::size_t v : ordered_targets) {
    double best_dist = -1.0;
    std::size_t best_id = 0;
    for (std::size_t idx : rng.sample_indices(rest.size(), cfg.q)) {
      const std::size_t candidate = rest[idx];
      const double dist =
          (g.features.row(static_cast<Eigen::Index>(v)) -
           g.features.row(static_cast<Eigen::Index>(candidate))).squaredNorm();
      if (dist > best_dist || (dist == best_dist && candidate < best_id)) {
        best_dist = dist;
        best_id = candidate;
      }
    }
    features.row(static_cast<Eigen::Index>(v)) =
        g.features.row(static_cast<Eigen::Index>(best_id));
    labels[v] = 1;
  }

  InjectionOutcome out;
  out.graph = make_graph(g.num_nodes, g.edges, std::move(features), std::move(labels));
  out.graph.directed = g.directed;
  out.selected_nodes = std::move(ordered_targets);
  return out;
}

Graph generate_clean_graph(std::size_t num_nodes, std::size_t feature_dim,
                           std::size_t communities, double intra_p, double inter_p,
                           std::uint64_t seed, double feature_noise) {
  if (num_nodes == 0) throw ConfigError("generate_clean_graph: num_nodes must be positive");
  if (communities == 0) throw ConfigError("generate_clean_graph: communities must be positive");
  if (intra_p < 0.0 || intra_p > 1.0 || inter_p < 0.0 || inter_p > 1.0)
    throw ConfigError("generate_clean_graph: probabilities must lie in [0, 1]");
  if (inter_p > intra_p)
    throw ConfigError("generate_clean_graph: intra_p must be at least inter_p");
  if (feature_noise < 0.0)
    throw ConfigError("generate_clean_graph: feature_noise must be non-negative");

  Rng rng(seed);
  Eigen::MatrixXd means(static_cast<Eigen::Index>(communities),
                        static_cast<Eigen::Index>(feature_dim));
  for (Eigen::Index c = 0; c < means.rows(); ++c)
    for (Eigen::Index j = 0; j < means.cols(); ++j) means(c, j) = rng.normal();

  Eigen::MatrixXd features(static_cast<Eigen::Index>(num_nodes),
                           static_cast<Eigen::Index>(feature_dim));
  for (std::size_t i = 0; i < num_nodes; ++i) {
    const auto community = static_cast<Eigen::Index>(i % communities);
    for (Eigen::Index j = 0; j < features.cols(); ++j)
      features(static_cast<Eigen::Index>(i), j) =
          means(community, j) + rng.normal(0.0, feature_noise);
  }

  std::vector<Edge> edges;
  for (std::size_t i = 0; i < num_nodes; ++i) {
    for (std::size_t j = i + 1; j < num_nodes; ++j) {
      const double p = (i % communities == j % communities) ? intra_p : inter_p;
      if (!rng.bernoulli(p)) continue;
      edges.push_back({i, j});
      edges.push_back({j, i});
    }
  }

  Graph g = make_graph(num_nodes, std::move(edges), std::move(features));
  g.directed = false;
  return g;
}

}  // namespace ctrlgad
