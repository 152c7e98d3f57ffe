#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "roadtrace/graph.hpp"

namespace roadtrace {

struct EvalConfig {
  double sample_spacing = 5.0;  // m
  double d_match = 15.0;        // m
};

struct EvalReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t inferred_matched = 0;
  std::size_t inferred_total = 0;
  std::size_t truth_matched = 0;
  std::size_t truth_total = 0;
};

// Points along every edge at most `spacing` apart, evenly spaced, both
// endpoints included; each vertex appears once.
std::vector<XY> sample_edges(const RoadGraph& g, double spacing);

// GEO precision/recall. Precision is the share of inferred samples within
// d_match of a truth edge, recall the share of truth samples within d_match
// of an inferred edge. Empty inferred: precision 1, recall 0. Empty truth:
// recall 1, precision 0 (1 if inferred is empty too). The inferred graph is
// reprojected into the truth's projection first.
EvalReport geo_precision_recall(const RoadGraph& inferred, const RoadGraph& truth,
                                const EvalConfig& cfg = {});

std::string to_json(const EvalReport& r);

// Root-mean-square distance from points sampled every `spacing` meters on g
// to the nearest edge of `truth`.
double rms_deviation(const RoadGraph& g, const RoadGraph& truth, double spacing = 1.0);

}  // namespace roadtrace
