#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "roadtrace/graph.hpp"

namespace roadtrace {

// Graph text format:
//
//   # comment
//   # origin <lon> <lat>            (optional; projection origin)
//   v <id> <lon> <lat>
//   e <id1> <id2> [support] [provenance]
//
// All vertex lines precede edge lines. Coordinates are written with 7
// decimals. Without an origin line the projection is centered on the mean
// vertex position. `projection`, when given, overrides the file's origin.
RoadGraph read_graph(std::string_view text,
                     std::optional<Projection> projection = std::nullopt);
std::string write_graph(const RoadGraph& g);

RoadGraph read_graph_file(const std::filesystem::path& path,
                          std::optional<Projection> projection = std::nullopt);
void write_graph_file(const std::filesystem::path& path, const RoadGraph& g);

// GeoJSON FeatureCollection with one LineString per edge.
std::string graph_to_geojson(const RoadGraph& g);

// Fixed "%.7f" formatting used by every text output.
std::string format_fixed(double v, int decimals = 7);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace roadtrace
