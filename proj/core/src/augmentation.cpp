#include "ctrlgad/augmentation.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

#include "ctrlgad/errors.hpp"
#include "json_detail.hpp"

namespace ctrlgad {
namespace {

void require_scores(const Graph& g, const std::vector<double>& scores) {
  if (scores.size() != g.num_nodes)
    throw PreconditionError("augmentation: " + std::to_string(scores.size()) +
                            " scores for " + std::to_string(g.num_nodes) + " nodes");
  for (double s : scores)
    if (!std::isfinite(s)) throw PreconditionError("augmentation: non-finite score");
}

void require_reciprocal(const Graph& g) {
  for (const Edge& e : g.edges)
    if (!g.has_edge(e.target, e.source))
      throw PreconditionError("augmentation: edge (" + std::to_string(e.source) + ", " +
                              std::to_string(e.target) +
                              ") has no reciprocal; symmetrize the graph first");
}

}  // namespace

Eigen::MatrixXd AugmentedGraph::attr_matrix() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(edge_attr_bins.size()),
                                            static_cast<Eigen::Index>(attr_dim));
  for (std::size_t e = 0; e < edge_attr_bins.size(); ++e)
    m(static_cast<Eigen::Index>(e), static_cast<Eigen::Index>(edge_attr_bins[e])) = 1.0;
  return m;
}

AugmentedGraph weight_edges(const Graph& g, const std::vector<double>& scores) {
  require_scores(g, scores);
  require_reciprocal(g);
  AugmentedGraph ag;
  ag.base = g;
  ag.edge_weights.reserve(g.edges.size());
  for (const Edge& e : g.edges) ag.edge_weights.push_back(1.0 + scores[e.source]);
  return ag;
}

std::vector<double> build_histogram(const std::vector<double>& scores, std::size_t k) {
  if (k == 0) throw ConfigError("build_histogram: bin count must be at least 1");
  if (scores.empty()) throw PreconditionError("build_histogram: no scores");
  for (double s : scores)
    if (!std::isfinite(s)) throw PreconditionError("build_histogram: non-finite score");
  const auto [lo_it, hi_it] = std::minmax_element(scores.begin(), scores.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  std::vector<double> edges(k + 1);
  for (std::size_t i = 0; i <= k; ++i)
    edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(k);
  edges[k] = hi;
  return edges;
}

std::size_t bin_index(const std::vector<double>& bin_edges, double value) {
  if (bin_edges.size() < 2)
    throw PreconditionError("bin_index: need at least two bin edges");
  const std::size_t k = bin_edges.size() - 1;
  const double lo = bin_edges.front();
  const double hi = bin_edges.back();
  if (hi <= lo) return 0;  // degenerate range: everything lands in bin 0

  double scaled = (value - lo) / (hi - lo) * static_cast<double>(k);
  scaled = std::clamp(scaled, 0.0, static_cast<double>(k - 1));
  std::size_t idx = static_cast<std::size_t>(scaled);
  // Repair rounding drift against the actual edges: enforce
  // bin_edges[idx] <= value < bin_edges[idx + 1], last bin closed.
  while (idx > 0 && value < bin_edges[idx]) --idx;
  while (idx < k - 1 && value >= bin_edges[idx + 1]) ++idx;
  return idx;
}

AugmentedGraph encode_edge_attrs(const Graph& g, const std::vector<double>& scores,
                                 std::size_t k) {
  require_scores(g, scores);
  require_reciprocal(g);
  AugmentedGraph ag;
  ag.base = g;
  ag.attr_dim = k;
  ag.bin_edges = build_histogram(scores, k);
  ag.edge_attr_bins.reserve(g.edges.size());
  for (const Edge& e : g.edges)
    ag.edge_attr_bins.push_back(bin_index(ag.bin_edges, scores[e.source]));
  return ag;
}

AugmentedGraph augment_graph(const Graph& g, const std::vector<double>& scores,
                             AugmentationMode mode, std::size_t k) {
  switch (mode) {
    case AugmentationMode::none: {
      AugmentedGraph ag;
      ag.base = g;
      return ag;
    }
    case AugmentationMode::weight:
      return weight_edges(g, scores);
    case AugmentationMode::attr:
      return encode_edge_attrs(g, scores, k);
    case AugmentationMode::both: {
      AugmentedGraph ag = encode_edge_attrs(g, scores, k);
      ag.edge_weights = weight_edges(g, scores).edge_weights;
      return ag;
    }
  }
  throw ConfigError("augment_graph: unknown mode");
}

void save_augmented_json(const AugmentedGraph& ag, const std::filesystem::path& file) {
  nlohmann::ordered_json j;
  j["graph"] = detail::graph_to_json(ag.base);
  j["edge_weights"] = ag.edge_weights;
  j["attr_dim"] = ag.attr_dim;
  j["edge_attr_bins"] = ag.edge_attr_bins;
  j["bin_edges"] = ag.bin_edges;
  detail::write_text_file(file, j.dump(2) + "\n");
}

AugmentedGraph load_augmented_json(const std::filesystem::path& file) {
  const nlohmann::json j = detail::parse_json_file(file);
  try {
    AugmentedGraph ag;
    ag.base = detail::graph_from_json(j.at("graph"));
    ag.edge_weights = j.at("edge_weights").get<std::vector<double>>();
    ag.attr_dim = j.at("attr_dim").get<std::size_t>();
    ag.edge_attr_bins = j.at("edge_attr_bins").get<std::vector<std::size_t>>();
    ag.bin_edges = j.at("bin_edges").get<std::vector<double>>();
    if (!ag.edge_weights.empty() && ag.edge_weights.size() != ag.base.num_edges())
      throw ValidationError("edge_weights length does not match the edge count");
    if (ag.attr_dim > 0) {
      if (ag.edge_attr_bins.size() != ag.base.num_edges())
        throw ValidationError("edge_attr_bins length does not match the edge count");
      if (ag.bin_edges.size() != ag.attr_dim + 1)
        throw ValidationError("bin_edges length must be attr_dim + 1");
      for (std::size_t b : ag.edge_attr_bins)
        if (b >= ag.attr_dim) throw ValidationError("bin index out of range");
    }
    return ag;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("bad augmented container " + file.string() + ": " + e.what());
  }
}

}  // namespace ctrlgad
