#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "ctrlgad/graph.hpp"

namespace ctrlgad::detail {

nlohmann::ordered_json graph_to_json(const Graph& g);
Graph graph_from_json(const nlohmann::json& j);

/// Parses a JSON file, converting syntax failures to ParseError with the
/// line derived from the byte offset.
nlohmann::json parse_json_file(const std::filesystem::path& file);

void write_text_file(const std::filesystem::path& file, const std::string& text);

}  // namespace ctrlgad::detail
