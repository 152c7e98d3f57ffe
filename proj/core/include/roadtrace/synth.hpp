#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "roadtrace/graph.hpp"
#include "roadtrace/trajectory.hpp"

namespace roadtrace::synth {

struct Grid {
  int n_blocks = 4;
  double block_m = 100.0;
};

// Two perpendicular roads that cross geometrically without sharing a
// vertex, like a grade-separated interchange.
struct TwoCrossingNoConnection {
  double length_m = 600.0;
};

struct Straight {
  double length_m = 500.0;
};

using GraphKind = std::variant<Grid, TwoCrossingNoConnection, Straight>;

struct SynthConfig {
  GraphKind graph_kind = Grid{};
  int n_trips = 100;
  double speed = 10.0;            // m/s
  double sample_interval = 1.0;   // s
  double noise_sigma = 4.0;       // m, per axis
  double bias_radius = 0.0;       // m, per-trip constant offset
  std::uint64_t rng_seed = 1;
  double start_time = 1.5e9;      // epoch seconds of trip 0
};

// Throws ConfigError on non-positive magnitudes.
void validate(const SynthConfig& cfg);

RoadGraph make_ground_truth(const GraphKind& kind,
                            const Projection& projection = Projection());

// Routes uniformly chosen vertex pairs along length-weighted shortest paths
// and samples them every speed * sample_interval meters. Trip i draws from
// its own RNG stream derived from (rng_seed, i), so output is deterministic.
// Throws GenerationError if trips cannot be routed within 10 * n_trips
// attempts.
std::vector<Trajectory> simulate_trips(const RoadGraph& truth,
                                       const SynthConfig& cfg);

}  // namespace roadtrace::synth
