#pragma once

#include <vector>

#include "roadtrace/graph.hpp"

namespace roadtrace {

struct RefineConfig {
  double junction_snap = 15.0;     // m
  double simplify_tol = 3.0;       // m
  int smooth_window = 3;           // vertices, odd
  double min_component_len = 50.0; // m
  // Interior vertices turning by more than this are treated as real corners
  // and kept in place during smoothing.
  double corner_angle = 45.0;      // degrees
};

void validate(const RefineConfig& cfg);

// Merges clusters of degree >= 3 vertices within `snap` of each other into
// their centroid, repeating until no two junctions are that close. Vertices
// with a base-map edge never move or merge.
RoadGraph snap_junctions(const RoadGraph& g, double snap);

// Junction snap, then moving-average smoothing and Douglas-Peucker
// simplification of degree-2 chains, then removal of small components with
// no base-map edge.
RoadGraph refine_geometry(const RoadGraph& g, const RefineConfig& cfg = {});

// Inserts the accepted inferred edges into `base`. An inserted endpoint within
// weld_radius of a base vertex is welded to the nearest one. Base vertices
// and edges are never changed. Throws IntegrityError for an edge that names
// a vertex missing from `inferred`.
RoadGraph merge_into_base(const RoadGraph& base, const RoadGraph& inferred,
                          const std::vector<EdgeKey>& accepted,
                          double weld_radius = 15.0);

}  // namespace roadtrace
