#include "ctrlgad/graph.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

#include "ctrlgad/errors.hpp"
#include "json_detail.hpp"

namespace ctrlgad {
namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string::size_type start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return fields;
}

std::vector<std::string> read_lines(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open " + file.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

std::size_t parse_node_id(const std::string& token, std::size_t line_no) {
  if (token.empty() || token.find_first_not_of("0123456789") != std::string::npos)
    throw ParseError("expected a non-negative integer node id, got '" + token + "'", line_no);
  errno = 0;
  const unsigned long long value = std::strtoull(token.c_str(), nullptr, 10);
  if (errno != 0) throw ParseError("node id out of representable range: '" + token + "'", line_no);
  return static_cast<std::size_t>(value);
}

double parse_real(const std::string& token, std::size_t line_no) {
  if (token.empty()) throw ParseError("empty numeric field", line_no);
  char* end = nullptr;
  const double value = std::strtod(token.c_str(), &end);
  if (end != token.c_str() + token.size())
    throw ParseError("expected a real number, got '" + token + "'", line_no);
  return value;
}

}  // namespace

bool Graph::has_edge(std::size_t source, std::size_t target) const {
  return std::binary_search(edges.begin(), edges.end(), Edge{source, target});
}

Graph make_graph(std::size_t num_nodes, std::vector<Edge> edges,
                 Eigen::MatrixXd features, std::vector<int> labels,
                 bool allow_self_loops) {
  if (features.size() == 0) {
    features.resize(static_cast<Eigen::Index>(num_nodes), 0);
  } else if (features.rows() != static_cast<Eigen::Index>(num_nodes)) {
    throw ValidationError("feature matrix has " + std::to_string(features.rows()) +
                          " rows for " + std::to_string(num_nodes) + " nodes");
  }
  if (!features.allFinite()) throw ValidationError("feature matrix contains non-finite values");

  if (labels.empty()) {
    labels.assign(num_nodes, 0);
  } else if (labels.size() != num_nodes) {
    throw ValidationError("label count " + std::to_string(labels.size()) +
                          " does not match node count " + std::to_string(num_nodes));
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1)
      throw ValidationError("label of node " + std::to_string(i) + " is not 0 or 1");
  }

  for (const Edge& e : edges) {
    if (e.source >= num_nodes || e.target >= num_nodes)
      throw ValidationError("edge (" + std::to_string(e.source) + ", " +
                            std::to_string(e.target) + ") references a node outside 0.." +
                            std::to_string(num_nodes == 0 ? 0 : num_nodes - 1));
    if (!allow_self_loops && e.source == e.target)
      throw ValidationError("self-loop on node " + std::to_string(e.source));
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  Graph g;
  g.num_nodes = num_nodes;
  g.edges = std::move(edges);
  g.features = std::move(features);
  g.labels = std::move(labels);
  return g;
}

Graph load_graph(const std::filesystem::path& edge_file,
                 const std::filesystem::path& feature_file,
                 const std::filesystem::path& label_file,
                 LoadDiagnostics* diagnostics) {
  const auto feature_lines = read_lines(feature_file);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < feature_lines.size(); ++i) {
    if (trim(feature_lines[i]).empty()) continue;
    const auto fields = split_csv(feature_lines[i]);
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& f : fields) row.push_back(parse_real(f, i + 1));
    if (!rows.empty() && row.size() != rows.front().size())
      throw ParseError("feature row has " + std::to_string(row.size()) +
                       " columns, expected " + std::to_string(rows.front().size()),
                       i + 1);
    rows.push_back(std::move(row));
  }
  const std::size_t num_nodes = rows.size();
  const std::size_t dim = rows.empty() ? 0 : rows.front().size();
  Eigen::MatrixXd features(static_cast<Eigen::Index>(num_nodes),
                           static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < num_nodes; ++i)
    for (std::size_t j = 0; j < dim; ++j)
      features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];

  std::vector<int> labels;
  const auto label_lines = read_lines(label_file);
  for (std::size_t i = 0; i < label_lines.size(); ++i) {
    if (trim(label_lines[i]).empty()) continue;
    for (const auto& token : split_csv(label_lines[i])) {
      if (token != "0" && token != "1")
        throw ParseError("label must be 0 or 1, got '" + token + "'", i + 1);
      labels.push_back(token == "1" ? 1 : 0);
    }
  }
  if (labels.size() != num_nodes)
    throw ValidationError("label file holds " + std::to_string(labels.size()) +
                          " entries for " + std::to_string(num_nodes) + " feature rows");

  std::vector<Edge> edges;
  const auto edge_lines = read_lines(edge_file);
  for (std::size_t i = 0; i < edge_lines.size(); ++i) {
    if (trim(edge_lines[i]).empty()) continue;
    const auto fields = split_csv(edge_lines[i]);
    if (fields.size() != 2)
      throw ParseError("expected 'source,target', got " + std::to_string(fields.size()) +
                       " fields", i + 1);
    edges.push_back({parse_node_id(fields[0], i + 1), parse_node_id(fields[1], i + 1)});
  }

  bool out_of_range = false;
  std::set<std::size_t> distinct;
  for (const Edge& e : edges) {
    distinct.insert(e.source);
    distinct.insert(e.target);
    if (e.source >= num_nodes || e.target >= num_nodes) out_of_range = true;
  }
  LoadDiagnostics local;
  LoadDiagnostics& diag = diagnostics ? *diagnostics : local;
  diag = {};
  if (out_of_range) {
    // Sparse ids are tolerated only when they pair off one-to-one with the
    // feature rows; anything else is a genuine range violation.
    if (distinct.size() != num_nodes)
      throw ValidationError("edge file references " + std::to_string(distinct.size()) +
                            " distinct ids with node ids beyond the " +
                            std::to_string(num_nodes) + " feature rows");
    std::map<std::size_t, std::size_t> remap;
    diag.id_map.assign(distinct.begin(), distinct.end());
    for (std::size_t i = 0; i < diag.id_map.size(); ++i) remap[diag.id_map[i]] = i;
    for (Edge& e : edges) {
      e.source = remap[e.source];
      e.target = remap[e.target];
    }
    diag.remapped = true;
  }

  std::sort(edges.begin(), edges.end());
  std::size_t unique_count = 0;
  for (std::size_t i = 0; i < edges.size(); ++i)
    if (i == 0 || !(edges[i] == edges[i - 1])) ++unique_count;
  diag.duplicate_edges = edges.size() - unique_count;

  return make_graph(num_nodes, std::move(edges), std::move(features), std::move(labels));
}

Graph symmetrize(const Graph& g) {
  std::vector<Edge> closed;
  closed.reserve(g.edges.size() * 2);
  for (const Edge& e : g.edges) {
    closed.push_back(e);
    closed.push_back({e.target, e.source});
  }
  Graph out = make_graph(g.num_nodes, std::move(closed), g.features, g.labels, true);
  out.directed = false;
  return out;
}

Eigen::MatrixXd to_dense(const Graph& g) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(g.num_nodes),
                                            static_cast<Eigen::Index>(g.num_nodes));
  for (const Edge& e : g.edges)
    a(static_cast<Eigen::Index>(e.source), static_cast<Eigen::Index>(e.target)) = 1.0;
  return a;
}

namespace detail {

nlohmann::ordered_json graph_to_json(const Graph& g) {
  nlohmann::ordered_json j;
  j["num_nodes"] = g.num_nodes;
  j["directed"] = g.directed;
  auto& edges = j["edges"] = nlohmann::ordered_json::array();
  for (const Edge& e : g.edges) edges.push_back({e.source, e.target});
  auto& features = j["features"] = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < g.features.rows(); ++i) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (Eigen::Index k = 0; k < g.features.cols(); ++k) row.push_back(g.features(i, k));
    features.push_back(std::move(row));
  }
  j["labels"] = g.labels;
  return j;
}

Graph graph_from_json(const nlohmann::json& j) {
  try {
    const auto num_nodes = j.at("num_nodes").get<std::size_t>();
    std::vector<Edge> edges;
    for (const auto& pair : j.at("edges")) {
      if (!pair.is_array() || pair.size() != 2)
        throw ValidationError("each edge must be a [source, target] pair");
      edges.push_back({pair.at(0).get<std::size_t>(), pair.at(1).get<std::size_t>()});
    }
    const auto& feat = j.at("features");
    const std::size_t dim = feat.empty() ? 0 : feat.at(0).size();
    Eigen::MatrixXd features(static_cast<Eigen::Index>(feat.size()),
                             static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < feat.size(); ++i) {
      if (feat.at(i).size() != dim)
        throw ValidationError("feature rows have inconsistent widths");
      for (std::size_t k = 0; k < dim; ++k)
        features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
            feat.at(i).at(k).get<double>();
    }
    if (feat.empty()) features.resize(static_cast<Eigen::Index>(num_nodes), 0);
    auto labels = j.at("labels").get<std::vector<int>>();
    Graph g = make_graph(num_nodes, std::move(edges), std::move(features),
                         std::move(labels), true);
    g.directed = j.at("directed").get<bool>();
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad graph container: ") + e.what());
  }
}

nlohmann::json parse_json_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open " + file.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + static_cast<std::size_t>(std::count(
                              text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto),
                              '\n'));
    throw ParseError(std::string("invalid JSON: ") + e.what(), line);
  }
}

void write_text_file(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw IoError("cannot write " + file.string());
  out << text;
  if (!out) throw IoError("write failed for " + file.string());
}

}  // namespace detail

void save_graph_json(const Graph& g, const std::filesystem::path& file) {
  detail::write_text_file(file, detail::graph_to_json(g).dump(2) + "\n");
}

Graph load_graph_json(const std::filesystem::path& file) {
  try {
    return detail::graph_from_json(detail::parse_json_file(file));
  } catch (const ValidationError& e) {
    throw ValidationError(std::string(e.what()) + " (" + file.string() + ")");
  }
}

}  // namespace ctrlgad
