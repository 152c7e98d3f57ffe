#include "roadtrace/traj_index.hpp"

#include <algorithm>
#include <cmath>

#include "roadtrace/error.hpp"

namespace roadtrace {

TrajIndex::TrajIndex(std::vector<Trajectory> trajs, double cell_size)
    : cell_size_(cell_size), trajs_(std::move(trajs)) {
  if (!(cell_size > 0.0) || !std::isfinite(cell_size)) {
    throw ConfigError("index cell_size must be positive");
  }
  for (std::size_t t = 0; t < trajs_.size(); ++t) {
    const auto& pts = trajs_[t].points;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      const XY a = pts[i].pos;
      const XY b = pts[i + 1].pos;
      const CellKey lo = cell_of({std::min(a.x, b.x), std::min(a.y, b.y)});
      const CellKey hi = cell_of({std::max(a.x, b.x), std::max(a.y, b.y)});
      for (auto cx = lo.cx; cx <= hi.cx; ++cx) {
        for (auto cy = lo.cy; cy <= hi.cy; ++cy) {
          buckets_[{cx, cy}].push_back({t, i});
        }
      }
    }
  }
}

CellKey TrajIndex::cell_of(XY p) const {
  return {static_cast<std::int64_t>(std::floor(p.x / cell_size_)),
          static_cast<std::int64_t>(std::floor(p.y / cell_size_))};
}

std::vector<SegmentRef> TrajIndex::candidates(XY center, double radius) const {
  const CellKey lo = cell_of({center.x - radius, center.y - radius});
  const CellKey hi = cell_of({center.x + radius, center.y + radius});
  std::vector<SegmentRef> out;
  for (auto cx = lo.cx; cx <= hi.cx; ++cx) {
    auto it = buckets_.lower_bound({cx, lo.cy});
    for (; it != buckets_.end() && it->first.cx == cx && it->first.cy <= hi.cy;
         ++it) {
      out.insert(out.end(), it->second.begin(), it->second.end());
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

TrajIndex build_index(std::vector<Trajectory> trajs, double cell_size) {
  return TrajIndex(std::move(trajs), cell_size);
}

std::vector<Crossing> query_crossings(const TrajIndex& index, XY center,
                                      double r_match) {
  // A point inside the disc lies in a cell the query square touches, and
  // every point belongs to at least one indexed segment, so scanning the
  // endpoints of candidate segments finds every inside point.
  std::vector<std::pair<std::size_t, std::size_t>> inside;
  const auto& trajs = index.trajectories();
  for (const SegmentRef& s : index.candidates(center, r_match)) {
    const auto& pts = trajs[s.traj].points;
    for (std::size_t i : {s.seg, s.seg + 1}) {
      if (distance(pts[i].pos, center) <= r_match) inside.emplace_back(s.traj, i);
    }
  }
  std::sort(inside.begin(), inside.end());
  inside.erase(std::unique(inside.begin(), inside.end()), inside.end());

  std::vector<Crossing> out;
  std::size_t k = 0;
  while (k < inside.size()) {
    std::size_t end = k;
    while (end + 1 < inside.size() && inside[end + 1].first == inside[k].first &&
           inside[end + 1].second == inside[end].second + 1) {
      ++end;
    }
    out.push_back({inside[k].first, inside[k].second, Orientation::kForward});
    out.push_back({inside[k].first, inside[end].second, Orientation::kReverse});
    k = end + 1;
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace roadtrace
