#pragma once

// Internal helpers for degree-2 chain processing shared by the baseline
// extractor and the refinement pass.

#include <vector>

#include "roadtrace/graph.hpp"

namespace roadtrace::detail {

// Maximal paths whose interior vertices all have degree 2. Each chain runs
// between vertices of degree != 2; pure cycles start and end at their
// lowest id. Every edge belongs to exactly one chain.
std::vector<std::vector<VertexId>> extract_chains(const RoadGraph& g);

// Indices of the points kept by Douglas-Peucker at `tolerance`; always
// includes the first and last index.
std::vector<std::size_t> douglas_peucker(const std::vector<XY>& pts,
                                         double tolerance);

std::vector<XY> chain_points(const RoadGraph& g, const std::vector<VertexId>& chain);

double chain_length(const RoadGraph& g, const std::vector<VertexId>& chain);

// Replaces the chain by the subsequence at `keep`, deleting dropped interior
// vertices. Extra interior points are retained where the shortcut would
// otherwise duplicate an edge or collapse a cycle.
void simplify_chain(RoadGraph& g, const std::vector<VertexId>& chain,
                    std::vector<std::size_t> keep, EdgeMeta meta);

}  // namespace roadtrace::detail
