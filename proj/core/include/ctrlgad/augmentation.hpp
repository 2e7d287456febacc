#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include <Eigen/Dense>

#include "ctrlgad/graph.hpp"

namespace ctrlgad {

/// A graph plus the score-derived decorations the model consumes. Weights
/// and attributes are aligned with base.edges; either may be absent.
/// Attribute vectors are one-hot over attr_dim histogram bins and are stored
/// as bin indices; attr_matrix() materializes the one-hot rows.
struct AugmentedGraph {
  Graph base;
  std::vector<double> edge_weights;
  std::vector<std::size_t> edge_attr_bins;
  std::size_t attr_dim = 0;
  std::vector<double> bin_edges;  // attr_dim + 1 entries when attrs present

  bool has_weights() const { return !edge_weights.empty(); }
  bool has_attrs() const { return attr_dim > 0; }
  Eigen::MatrixXd attr_matrix() const;
};

/// Weight of edge (u, v) = 1 + scores[u]. The graph must already contain
/// every reciprocal edge; call symmetrize first.
AugmentedGraph weight_edges(const Graph& g, const std::vector<double>& scores);

/// k + 1 equal-width bin edges spanning [min(scores), max(scores)]. The
/// degenerate min = max case keeps the edges but maps every value to bin 0.
std::vector<double> build_histogram(const std::vector<double>& scores, std::size_t k);

/// Bin index of value under half-open bins [e_i, e_i+1), last bin closed.
/// Values outside the range clamp to the nearest bin.
std::size_t bin_index(const std::vector<double>& bin_edges, double value);

/// One-hot attribute per edge: the bin holding the source node's score.
AugmentedGraph encode_edge_attrs(const Graph& g, const std::vector<double>& scores,
                                 std::size_t k);

/// Weights, attributes, or both in one container.
enum class AugmentationMode { none, weight, attr, both };
AugmentedGraph augment_graph(const Graph& g, const std::vector<double>& scores,
                             AugmentationMode mode, std::size_t k = 0);

/// JSON container embedding the base graph together with weights, bin
/// indices, and bin edges. Round-trips exactly.
void save_augmented_json(const AugmentedGraph& ag, const std::filesystem::path& file);
AugmentedGraph load_augmented_json(const std::filesystem::path& file);

}  // namespace ctrlgad
