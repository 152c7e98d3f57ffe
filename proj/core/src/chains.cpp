#include "chains.hpp"

#include <algorithm>
#include <set>

namespace roadtrace::detail {

std::vector<std::vector<VertexId>> extract_chains(const RoadGraph& g) {
  std::vector<std::vector<VertexId>> chains;
  std::set<EdgeKey> used;

  auto walk = [&](VertexId start, VertexId first) {
    std::vector<VertexId> chain{start};
    VertexId prev = start;
    VertexId cur = first;
    used.insert(EdgeKey(start, first));
    while (cur != start && g.degree(cur) == 2) {
      chain.push_back(cur);
      const auto& nb = g.neighbors(cur);
      const VertexId next = *nb.begin() == prev ? *nb.rbegin() : *nb.begin();
      if (!used.insert(EdgeKey(cur, next)).second) break;
      prev = cur;
      cur = next;
    }
    chain.push_back(cur);
    return chain;
  };

  for (const auto& [v, pos] : g.vertices()) {
    if (g.degree(v) == 2) continue;
    for (VertexId n : g.neighbors(v)) {
      if (used.count(EdgeKey(v, n))) continue;
      chains.push_back(walk(v, n));
    }
  }
  for (const auto& [v, pos] : g.vertices()) {
    if (g.degree(v) != 2) continue;
    for (VertexId n : g.neighbors(v)) {
      if (used.count(EdgeKey(v, n))) continue;
      chains.push_back(walk(v, n));
    }
  }
  return chains;
}

namespace {

void dp_recurse(const std::vector<XY>& pts, std::size_t lo, std::size_t hi,
                double tol, std::vector<bool>& keep) {
  if (hi <= lo + 1) return;
  double worst = -1.0;
  std::size_t idx = lo;
  for (std::size_t i = lo + 1; i < hi; ++i) {
    const double d = point_segment_distance(pts[i], pts[lo], pts[hi]);
    if (d > worst) {
      worst = d;
      idx = i;
    }
  }
  if (worst > tol) {
    keep[idx] = true;
    dp_recurse(pts, lo, idx, tol, keep);
    dp_recurse(pts, idx, hi, tol, keep);
  }
}

std::size_t farthest_interior(const std::vector<XY>& pts, std::size_t lo,
                              std::size_t hi) {
  std::size_t best = lo + 1;
  double worst = -1.0;
  for (std::size_t i = lo + 1; i < hi; ++i) {
    const double d = point_segment_distance(pts[i], pts[lo], pts[hi]);
    if (d > worst) {
      worst = d;
      best = i;
    }
  }
  return best;
}

}  // namespace

std::vector<std::size_t> douglas_peucker(const std::vector<XY>& pts,
                                         double tolerance) {
  if (pts.size() <= 2) {
    std::vector<std::size_t> all(pts.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return all;
  }
  std::vector<bool> keep(pts.size(), false);
  keep.front() = keep.back() = true;
  dp_recurse(pts, 0, pts.size() - 1, tolerance, keep);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (keep[i]) out.push_back(i);
  }
  return out;
}

std::vector<XY> chain_points(const RoadGraph& g, const std::vector<VertexId>& chain) {
  std::vector<XY> pts;
  pts.reserve(chain.size());
  for (VertexId v : chain) pts.push_back(g.position(v));
  return pts;
}

double chain_length(const RoadGraph& g, const std::vector<VertexId>& chain) {
  double len = 0.0;
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
    len += distance(g.position(chain[i]), g.position(chain[i + 1]));
  }
  return len;
}

void simplify_chain(RoadGraph& g, const std::vector<VertexId>& chain,
                    std::vector<std::size_t> keep, EdgeMeta meta) {
  if (chain.size() <= 2 || keep.size() == chain.size()) return;
  const auto pts = chain_points(g, chain);
  const std::size_t last = chain.size() - 1;
  const bool closed = chain.front() == chain.back();

  // A closed chain needs two interior points to stay a cycle.
  while (closed && keep.size() < 4) {
    std::size_t best_gap = 0;
    for (std::size_t i = 0; i + 1 < keep.size(); ++i) {
      if (keep[i + 1] - keep[i] > keep[best_gap + 1] - keep[best_gap]) best_gap = i;
    }
    if (keep[best_gap + 1] - keep[best_gap] < 2) return;
    keep.push_back(farthest_interior(pts, keep[best_gap], keep[best_gap + 1]));
    std::sort(keep.begin(), keep.end());
  }

  std::set<std::size_t> kept(keep.begin(), keep.end());
  for (std::size_t i = 0; i < last; ++i) g.remove_edge(chain[i], chain[i + 1]);
  for (std::size_t i = 1; i < last; ++i) {
    if (!kept.count(i)) g.remove_vertex(chain[i]);
  }
  // An open chain collapsing onto an edge that already exists keeps one
  // interior point so the parallel road survives.
  if (!closed && keep.size() == 2 && g.has_edge(chain.front(), chain.back())) {
    const std::size_t mid = farthest_interior(pts, 0, last);
    g.add_vertex(chain[mid], pts[mid]);
    keep = {0, mid, last};
  }
  for (std::size_t i = 0; i + 1 < keep.size(); ++i) {
    g.add_edge(chain[keep[i]], chain[keep[i + 1]], meta);
  }
}

}  // namespace roadtrace::detail
