#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "roadtrace/graph.hpp"
#include "roadtrace/traj_index.hpp"

namespace roadtrace {

struct TraceConfig {
  int n_bins = 64;
  double step_d = 20.0;               // m
  double r_match = 12.0;              // m
  double r_hist = 30.0;               // m
  double smooth_sigma_bins = 2.0;
  double conf_threshold = 2.0;        // trajectories
  double merge_radius = 10.0;         // m
  double exclusion_halfwidth = 30.0;  // degrees
  long max_iterations = 100000;
};

// Throws ConfigError unless step_d > merge_radius, r_hist > r_match,
// n_bins >= 8 and every magnitude is positive.
void validate(const TraceConfig& cfg);

struct PolarHistogram {
  std::vector<double> bins;    // smoothed weights
  std::vector<int> raw_counts;  // exits per bin before smoothing

  int n_bins() const { return static_cast<int>(bins.size()); }
};

// Exit-direction histogram around `center`. Every crossing of the r_match
// disc is followed (in its orientation) until it first leaves the r_hist
// circle; the exit bearing is interpolated onto the circle. Crossings whose
// trajectory ends inside r_hist contribute nothing.
//
// When `arrival_bearings` is non-empty, a crossing only counts if it either
// starts inside r_hist or entered the r_hist circle within
// cfg.exclusion_halfwidth of one of the given bearings (seen from center).
PolarHistogram compute_polar_histogram(
    const TrajIndex& index, XY center, const TraceConfig& cfg,
    std::span<const double> arrival_bearings = {});

// Circular Gaussian smoothing, kernel normalized to sum 1.
std::vector<double> smooth_circular(const std::vector<int>& raw, double sigma_bins);

struct Peak {
  BinIndex bin = 0;
  double confidence = 0.0;

  friend bool operator==(const Peak&, const Peak&) = default;
};

// Peaks of the smoothed histogram whose raw mass over +-2 bins reaches
// cfg.conf_threshold and whose center is more than exclusion_halfwidth from
// every explored bearing. Sorted by confidence desc, then bin asc.
std::vector<Peak> find_unexplored_peaks(const PolarHistogram& h,
                                        std::span<const double> explored,
                                        const TraceConfig& cfg);

// Source of (confidence, direction) evidence at a graph vertex.
class ConfidenceOracle {
 public:
  virtual ~ConfidenceOracle() = default;
  virtual PolarHistogram evaluate(const RoadGraph& g, VertexId v) const = 0;

  // Whether a step arriving at `to` from `from` may merge onto `to`. The
  // default always allows it.
  virtual bool supports_link(const RoadGraph& g, VertexId from, VertexId to) const;
};

// Histogram from GPS trajectories, conditioned on arrival along the
// vertex's incident edges (unconditioned at vertices without edges).
class GpsOracle : public ConfidenceOracle {
 public:
  GpsOracle(const TrajIndex& index, TraceConfig cfg) : index_(index), cfg_(cfg) {}
  PolarHistogram evaluate(const RoadGraph& g, VertexId v) const override;

  // True when `to` has no edges yet, or when at least conf_threshold
  // trajectories that reach `to` from the side of `from` leave along one of
  // its existing edges. Keeps two roads that only cross geometrically apart.
  bool supports_link(const RoadGraph& g, VertexId from, VertexId to) const override;

 private:
  const TrajIndex& index_;
  TraceConfig cfg_;
};

struct TraceAction {
  VertexId vertex = 0;
  BinIndex bin = 0;
  double confidence = 0.0;

  friend bool operator==(const TraceAction&, const TraceAction&) = default;
};

// Directions already tried at a vertex that led nowhere (duplicate edges).
using ExploredMarks = std::map<VertexId, std::vector<double>>;

// Bearings of v's incident edges plus any marks recorded for v.
std::vector<double> explored_bearings(const RoadGraph& g, VertexId v,
                                      const ExploredMarks* marks = nullptr);

std::optional<TraceAction> best_action(const RoadGraph& g,
                                       const std::set<VertexId>& frontier,
                                       const ConfidenceOracle& oracle,
                                       const TraceConfig& cfg,
                                       const ExploredMarks* marks = nullptr);

struct StepResult {
  VertexId target = 0;
  bool created_vertex = false;
  bool added_edge = false;
};

// Adds one segment of length step_d from action.vertex along the bin center,
// merging onto the nearest vertex within merge_radius of the endpoint. With
// an oracle, a merge it does not support creates a new vertex instead. A
// new endpoint within merge_radius of an edge not incident to action.vertex
// that runs within exclusion_halfwidth of the step direction would duplicate
// a mapped road; the step is refused (target = action.vertex, no edge).
StepResult apply_step(RoadGraph& g, const TraceAction& action,
                      const TraceConfig& cfg,
                      const ConfidenceOracle* oracle = nullptr);

// Up to k seeds from a trajectory-density grid with cell r_hist, strongest
// first, separated by at least 2 * r_hist.
std::vector<XY> detect_seeds(const TrajIndex& index, const TraceConfig& cfg,
                             std::size_t k);

enum class StopReason { kConverged, kMaxIterations };

struct TraceResult {
  RoadGraph graph;
  long iterations = 0;
  long edges_added = 0;
  StopReason stop_reason = StopReason::kConverged;
  bool truncated() const { return stop_reason == StopReason::kMaxIterations; }
};

std::string to_string(StopReason r);

// Grows `base` one edge per iteration at the globally most confident
// (vertex, direction) until no peak reaches the threshold.
TraceResult trace(const RoadGraph& base, const std::vector<XY>& seeds,
                  const ConfidenceOracle& oracle, const TraceConfig& cfg);

}  // namespace roadtrace
