#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "roadtrace/trajectory.hpp"

namespace roadtrace {

struct CellKey {
  std::int64_t cx = 0;
  std::int64_t cy = 0;

  friend auto operator<=>(const CellKey&, const CellKey&) = default;
};

// Reference to the segment between points `seg` and `seg + 1`.
struct SegmentRef {
  std::size_t traj = 0;
  std::size_t seg = 0;

  friend auto operator<=>(const SegmentRef&, const SegmentRef&) = default;
};

enum class Orientation { kForward, kReverse };

// One maximal run of a trajectory's points inside a query disc, seen in one
// traversal orientation. `enter_index` is the first point of the run in that
// orientation (the run's last point for kReverse).
struct Crossing {
  std::size_t traj = 0;
  std::size_t enter_index = 0;
  Orientation orientation = Orientation::kForward;

  friend auto operator<=>(const Crossing&, const Crossing&) = default;
};

// Uniform-grid bucket index over trajectory segments. Owns its
// trajectories; immutable after construction, so concurrent queries are safe.
class TrajIndex {
 public:
  // Throws ConfigError if cell_size <= 0.
  TrajIndex(std::vector<Trajectory> trajs, double cell_size);

  double cell_size() const { return cell_size_; }
  const std::vector<Trajectory>& trajectories() const { return trajs_; }
  const std::map<CellKey, std::vector<SegmentRef>>& buckets() const {
    return buckets_;
  }

  CellKey cell_of(XY p) const;

  // Every segment whose bounding box overlaps the square around center
  // with half-width radius. A superset of the segments that meet the disc.
  std::vector<SegmentRef> candidates(XY center, double radius) const;

 private:
  double cell_size_;
  std::vector<Trajectory> trajs_;
  std::map<CellKey, std::vector<SegmentRef>> buckets_;
};

TrajIndex build_index(std::vector<Trajectory> trajs, double cell_size);

// Crossings of every trajectory through the disc (center, r_match), in
// (traj, enter_index, orientation) order.
std::vector<Crossing> query_crossings(const TrajIndex& index, XY center,
                                      double r_match);

}  // namespace roadtrace
