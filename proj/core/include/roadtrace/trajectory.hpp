#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "roadtrace/geo.hpp"

namespace roadtrace {

struct TrajPoint {
  double t = 0.0;  // epoch seconds
  XY pos;

  friend bool operator==(const TrajPoint&, const TrajPoint&) = default;
};

struct Trajectory {
  std::string id;
  std::vector<TrajPoint> points;

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

struct TrajectorySet {
  Projection projection;
  std::vector<Trajectory> trajectories;
};

// Parses `traj_id,timestamp,lon,lat` CSV. Trajectories come out in order of
// first appearance, points sorted by timestamp. Without an explicit
// projection the origin is the mean of all points.
TrajectorySet parse_trajectories(
    std::string_view csv, std::optional<Projection> projection = std::nullopt);

std::string write_trajectories(const std::vector<Trajectory>& trajs,
                               const Projection& projection);

struct CleanConfig {
  double gap_s = 30.0;
  double v_max = 40.0;  // m/s
};

// Splits at time gaps > gap_s, drops points that imply speed > v_max from
// the last kept point, and discards pieces with fewer than 2 points. When a
// trajectory is split, piece k is named "<id>#<k>".
std::vector<Trajectory> clean(const std::vector<Trajectory>& trajs,
                              const CleanConfig& cfg = {});

}  // namespace roadtrace
