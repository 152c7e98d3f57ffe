#pragma once

#include <cstdint>
#include <vector>

#include "roadtrace/graph.hpp"
#include "roadtrace/trajectory.hpp"

namespace roadtrace {

// Distinct-trajectory counts on a grid aligned to multiples of cell_size.
struct DensityGrid {
  double cell_size = 1.0;
  XY origin;  // lower-left corner of cell (0, 0)
  int width = 0;
  int height = 0;
  std::vector<int> counts;  // row-major, row = y index

  int at(int col, int row) const { return counts[static_cast<std::size_t>(row) * width + col]; }
  XY cell_center(int col, int row) const {
    return {origin.x + (col + 0.5) * cell_size, origin.y + (row + 0.5) * cell_size};
  }
};

// Each trajectory adds 1 to every cell its polyline passes through (grid
// traversal of each segment, so fast movers do not skip cells).
// Throws ConfigError if cell_size <= 0.
DensityGrid density_grid(const std::vector<Trajectory>& trajs, double cell_size);

// Cells reached by the segment a-b, in traversal order, as global cell
// coordinates (floor(x / cell_size), floor(y / cell_size)). An exact corner
// pass also takes the +x side cell.
std::vector<std::pair<std::int64_t, std::int64_t>> traverse_cells(XY a, XY b,
                                                                  double cell_size);

// Road mask (counts >= threshold, threshold clamped to >= 1) thinned with
// Zhang-Suen. Same layout as the grid.
std::vector<std::uint8_t> road_mask(const DensityGrid& grid, int threshold);
std::vector<std::uint8_t> zhang_suen_thin(std::vector<std::uint8_t> mask, int width,
                                          int height);

// Mask -> thinned skeleton -> pixel graph -> spur removal -> Douglas-Peucker
// collapse of degree-2 chains. Edges carry provenance `baseline`.
RoadGraph extract_graph(const DensityGrid& grid, int threshold,
                        const Projection& projection = Projection());

}  // namespace roadtrace
