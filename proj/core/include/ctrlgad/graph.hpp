#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <vector>

#include <Eigen/Dense>

namespace ctrlgad {

struct Edge {
  std::size_t source = 0;
  std::size_t target = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Directed attributed graph. Edges are kept in canonical order (sorted by
/// source, then target, no duplicates), so structural equality is just
/// field-wise equality. Instances are treated as immutable once built; all
/// operations return fresh copies.
struct Graph {
  std::size_t num_nodes = 0;
  std::vector<Edge> edges;
  Eigen::MatrixXd features;  // num_nodes rows; zero columns when absent
  std::vector<int> labels;   // one {0, 1} entry per node
  bool directed = true;

  std::size_t num_edges() const { return edges.size(); }
  std::size_t feature_dim() const { return static_cast<std::size_t>(features.cols()); }
  bool has_edge(std::size_t source, std::size_t target) const;
};

/// Canonicalizes the edge list (sort + dedup) and validates every Graph
/// invariant. Empty labels are expanded to all-zero; an empty feature matrix
/// becomes num_nodes x 0. Throws ValidationError on bad ids, self-loops
/// (unless allowed), or shape mismatches.
Graph make_graph(std::size_t num_nodes, std::vector<Edge> edges,
                 Eigen::MatrixXd features = {}, std::vector<int> labels = {},
                 bool allow_self_loops = false);

/// What load_graph did to the raw input.
struct LoadDiagnostics {
  std::size_t duplicate_edges = 0;  // dropped while canonicalizing
  bool remapped = false;
  std::vector<std::size_t> id_map;  // id_map[new_id] = original id, when remapped
};

/// Reads a graph from three text files: edge list ("source,target" per line),
/// feature rows (comma-separated reals, one row per node), and labels (one
/// 0/1 entry per node). The feature row count defines num_nodes. Ids that
/// exceed the node count are remapped to 0..N-1 only when the distinct ids
/// cover exactly N values (feature row i then belongs to the i-th smallest
/// id); otherwise the load fails.
Graph load_graph(const std::filesystem::path& edge_file,
                 const std::filesystem::path& feature_file,
                 const std::filesystem::path& label_file,
                 LoadDiagnostics* diagnostics = nullptr);

/// Adds the reciprocal of every edge. Idempotent; features and labels are
/// carried over untouched and the result is marked undirected.
Graph symmetrize(const Graph& g);

/// Dense 0/1 adjacency, entry (i, j) = 1 iff edge (i, j) exists.
Eigen::MatrixXd to_dense(const Graph& g);

/// Single-file JSON container round trip (num_nodes, edges, features,
/// labels, directed). Reloading reproduces the graph exactly.
void save_graph_json(const Graph& g, const std::filesystem::path& file);
Graph load_graph_json(const std::filesystem::path& file);

}  // namespace ctrlgad
