#include "roadtrace/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <set>

#include "chains.hpp"
#include "roadtrace/error.hpp"

namespace roadtrace {

namespace {

using Cell = std::pair<std::int64_t, std::int64_t>;

std::int64_t cell_coord(double v, double cs) {
  return static_cast<std::int64_t>(std::floor(v / cs));
}

}  // namespace

std::vector<Cell> traverse_cells(XY a, XY b, double cell_size) {
  std::int64_t cx = cell_coord(a.x, cell_size);
  std::int64_t cy = cell_coord(a.y, cell_size);
  const std::int64_t ex = cell_coord(b.x, cell_size);
  const std::int64_t ey = cell_coord(b.y, cell_size);
  std::vector<Cell> out{{cx, cy}};

  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double inf = std::numeric_limits<double>::infinity();
  const int sx = ex > cx ? 1 : (ex < cx ? -1 : 0);
  const int sy = ey > cy ? 1 : (ey < cy ? -1 : 0);
  double t_max_x = sx > 0 ? ((cx + 1) * cell_size - a.x) / dx
                 : sx < 0 ? (cx * cell_size - a.x) / dx
                          : inf;
  double t_max_y = sy > 0 ? ((cy + 1) * cell_size - a.y) / dy
                 : sy < 0 ? (cy * cell_size - a.y) / dy
                          : inf;
  const double t_dx = sx != 0 ? cell_size / std::abs(dx) : inf;
  const double t_dy = sy != 0 ? cell_size / std::abs(dy) : inf;

  // Exactly |ex - cx| + |ey - cy| unit moves reach the end cell; each move
  // takes the axis whose boundary the segment crosses first.
  while (cx != ex || cy != ey) {
    const bool x_left = cx != ex;
    const bool y_left = cy != ey;
    if (x_left && (!y_left || t_max_x <= t_max_y)) {
      cx += sx;
      t_max_x += t_dx;
    } else {
      cy += sy;
      t_max_y += t_dy;
    }
    out.emplace_back(cx, cy);
  }
  return out;
}

DensityGrid density_grid(const std::vector<Trajectory>& trajs, double cell_size) {
  if (!(cell_size > 0.0) || !std::isfinite(cell_size)) {
    throw ConfigError("grid cell_size must be positive");
  }
  std::vector<std::vector<Cell>> per_traj;
  per_traj.reserve(trajs.size());
  std::int64_t min_x = 0, min_y = 0, max_x = -1, max_y = -1;
  bool any = false;
  for (const auto& tr : trajs) {
    std::vector<Cell> cells;
    const auto& pts = tr.points;
    if (pts.size() == 1) {
      cells.emplace_back(cell_coord(pts[0].pos.x, cell_size),
                         cell_coord(pts[0].pos.y, cell_size));
    }
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      auto seg = traverse_cells(pts[i].pos, pts[i + 1].pos, cell_size);
      cells.insert(cells.end(), seg.begin(), seg.end());
    }
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    for (const auto& [x, y] : cells) {
      if (!any) {
        min_x = max_x = x;
        min_y = max_y = y;
        any = true;
      }
      min_x = std::min(min_x, x);
      max_x = std::max(max_x, x);
      min_y = std::min(min_y, y);
      max_y = std::max(max_y, y);
    }
    per_traj.push_back(std::move(cells));
  }

  DensityGrid grid;
  grid.cell_size = cell_size;
  if (!any) return grid;
  grid.origin = {min_x * cell_size, min_y * cell_size};
  grid.width = static_cast<int>(max_x - min_x + 1);
  grid.height = static_cast<int>(max_y - min_y + 1);
  grid.counts.assign(static_cast<std::size_t>(grid.width) * grid.height, 0);
  for (const auto& cells : per_traj) {
    for (const auto& [x, y] : cells) {
      ++grid.counts[static_cast<std::size_t>(y - min_y) * grid.width + (x - min_x)];
    }
  }
  return grid;
}

std::vector<std::uint8_t> road_mask(const DensityGrid& grid, int threshold) {
  const int t = std::max(threshold, 1);
  std::vector<std::uint8_t> mask(grid.counts.size(), 0);
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = grid.counts[i] >= t;
  return mask;
}

namespace {

// 8-connected component label per set pixel (-1 for background).
std::vector<int> label_components(const std::vector<std::uint8_t>& mask, int w,
                                  int h, int* n_labels) {
  std::vector<int> label(mask.size(), -1);
  int next = 0;
  std::vector<int> stack;
  for (int start = 0; start < w * h; ++start) {
    if (!mask[start] || label[start] >= 0) continue;
    label[start] = next;
    stack.push_back(start);
    while (!stack.empty()) {
      const int p = stack.back();
      stack.pop_back();
      const int x = p % w;
      const int y = p / w;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int nx = x + dx;
          const int ny = y + dy;
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          const int q = ny * w + nx;
          if (mask[q] && label[q] < 0) {
            label[q] = next;
            stack.push_back(q);
          }
        }
      }
    }
    ++next;
  }
  *n_labels = next;
  return label;
}

}  // namespace

std::vector<std::uint8_t> zhang_suen_thin(std::vector<std::uint8_t> mask, int width,
                                          int height) {
  const std::vector<std::uint8_t> original = mask;
  // Padded working copy so neighbors never leave the image.
  const int w = width + 2;
  const int h = height + 2;
  std::vector<std::uint8_t> img(static_cast<std::size_t>(w) * h, 0);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) img[(y + 1) * w + x + 1] = mask[y * width + x];
  }

  auto px = [&](int x, int y) { return static_cast<int>(img[y * w + x]); };
  bool changed = true;
  std::vector<int> remove;
  while (changed) {
    changed = false;
    for (int pass = 0; pass < 2; ++pass) {
      remove.clear();
      for (int y = 1; y < h - 1; ++y) {
        for (int x = 1; x < w - 1; ++x) {
          if (!px(x, y)) continue;
          // P2..P9 clockwise from north.
          const int p[8] = {px(x, y + 1),     px(x + 1, y + 1), px(x + 1, y),
                            px(x + 1, y - 1), px(x, y - 1),     px(x - 1, y - 1),
                            px(x - 1, y),     px(x - 1, y + 1)};
          int b = 0;
          int a = 0;
          for (int i = 0; i < 8; ++i) {
            b += p[i];
            if (!p[i] && p[(i + 1) % 8]) ++a;
          }
          if (b < 2 || b > 6 || a != 1) continue;
          const int n = p[0], e = p[2], s = p[4], wst = p[6];
          const bool ok = pass == 0 ? (n * e * s == 0 && e * s * wst == 0)
                                    : (n * e * wst == 0 && n * s * wst == 0);
          if (ok) remove.push_back(y * w + x);
        }
      }
      for (int i : remove) img[i] = 0;
      changed = changed || !remove.empty();
    }
  }

  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) mask[y * width + x] = img[(y + 1) * w + x + 1];
  }

  // Zhang-Suen erases 2x2 blocks completely; keep one pixel of any
  // component that vanished.
  int n_labels = 0;
  const auto labels = label_components(original, width, height, &n_labels);
  std::vector<bool> present(n_labels, false);
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) present[labels[i]] = true;
  }
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (labels[i] >= 0 && !present[labels[i]]) {
      mask[i] = 1;
      present[labels[i]] = true;
    }
  }
  return mask;
}

namespace {

// Removes dangling chains shorter than min_len that end in a junction, and
// whole components shorter than min_len. Repeats until stable.
void remove_spurs(RoadGraph& g, double min_len) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& chain : detail::extract_chains(g)) {
      const VertexId a = chain.front();
      const VertexId b = chain.back();
      if (!g.has_vertex(a) || !g.has_vertex(b)) continue;
      if (!g.has_edge(chain[0], chain[1])) continue;  // already modified
      const std::size_t da = g.degree(a);
      const std::size_t db = g.degree(b);
      const bool spur = (da == 1 && db >= 3) || (db == 1 && da >= 3);
      if (!spur || detail::chain_length(g, chain) >= min_len) continue;
      const VertexId keep = da >= 3 ? a : b;
      for (VertexId v : chain) {
        if (v != keep) g.remove_vertex(v);
      }
      changed = true;
    }
  }
  for (const auto& comp : connected_components(g)) {
    double len = 0.0;
    for (VertexId v : comp) {
      for (VertexId n : g.neighbors(v)) {
        if (v < n) len += distance(g.position(v), g.position(n));
      }
    }
    if (len < min_len) {
      for (VertexId v : comp) g.remove_vertex(v);
    }
  }
}

}  // namespace

RoadGraph extract_graph(const DensityGrid& grid, int threshold,
                        const Projection& projection) {
  RoadGraph g(projection);
  if (grid.width == 0 || grid.height == 0) return g;
  const int w = grid.width;
  const int h = grid.height;
  const auto skel = zhang_suen_thin(road_mask(grid, threshold), w, h);
  auto on = [&](int x, int y) {
    return x >= 0 && y >= 0 && x < w && y < h && skel[y * w + x];
  };

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (on(x, y)) g.add_vertex(static_cast<VertexId>(y) * w + x, grid.cell_center(x, y));
    }
  }
  auto link = [&](int x, int y, int nx, int ny) {
    const int support = std::min(grid.at(x, y), grid.at(nx, ny));
    g.add_edge(static_cast<VertexId>(y) * w + x, static_cast<VertexId>(ny) * w + nx,
               {support, Provenance::kBaseline});
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!on(x, y)) continue;
      if (on(x + 1, y)) link(x, y, x + 1, y);
      if (on(x, y + 1)) link(x, y, x, y + 1);
      // Diagonals only where no 4-connected detour exists, so the pixel
      // graph has no triangles.
      if (on(x + 1, y + 1) && !on(x + 1, y) && !on(x, y + 1)) link(x, y, x + 1, y + 1);
      if (on(x + 1, y - 1) && !on(x + 1, y) && !on(x, y - 1)) link(x, y, x + 1, y - 1);
    }
  }
  std::vector<VertexId> isolated;
  for (const auto& [id, pos] : g.vertices()) {
    if (g.degree(id) == 0) isolated.push_back(id);
  }
  for (VertexId id : isolated) g.remove_vertex(id);

  remove_spurs(g, 3.0 * grid.cell_size);

  for (const auto& chain : detail::extract_chains(g)) {
    int support = std::numeric_limits<int>::max();
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
      support = std::min(support, g.edge_meta(chain[i], chain[i + 1]).support);
    }
    const auto keep = detail::douglas_peucker(detail::chain_points(g, chain),
                                              grid.cell_size);
    detail::simplify_chain(g, chain, keep, {support, Provenance::kBaseline});
  }
  return g;
}

}  // namespace roadtrace
