#include "roadtrace/refine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "chains.hpp"
#include "roadtrace/error.hpp"

namespace roadtrace {

namespace {

bool base_attached(const RoadGraph& g, VertexId v) {
  for (VertexId n : g.neighbors(v)) {
    if (g.edge_meta(v, n).provenance == Provenance::kBaseMap) return true;
  }
  return false;
}

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  std::size_t find(std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

double turn_angle(XY prev, XY cur, XY next) {
  const XY u = cur - prev;
  const XY v = next - cur;
  const double nu = norm(u);
  const double nv = norm(v);
  if (nu == 0.0 || nv == 0.0) return 0.0;
  const double c = std::clamp(dot(u, v) / (nu * nv), -1.0, 1.0);
  return std::acos(c) * 180.0 / kPi;
}

void refine_chain(RoadGraph& g, const std::vector<VertexId>& chain,
                  const RefineConfig& cfg) {
  int support = std::numeric_limits<int>::max();
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
    const EdgeMeta& m = g.edge_meta(chain[i], chain[i + 1]);
    if (m.provenance == Provenance::kBaseMap) return;
    support = std::min(support, m.support);
  }
  if (chain.size() < 3) return;

  const auto pts = detail::chain_points(g, chain);
  const std::size_t last = pts.size() - 1;
  std::vector<std::size_t> anchors{0};
  for (std::size_t i = 1; i < last; ++i) {
    if (turn_angle(pts[i - 1], pts[i], pts[i + 1]) > cfg.corner_angle) {
      anchors.push_back(i);
    }
  }
  anchors.push_back(last);

  // Centered moving average inside each anchor-to-anchor span; the window
  // shrinks symmetrically near anchors so it stays centered.
  std::vector<XY> smoothed = pts;
  const std::size_t half = static_cast<std::size_t>(std::max(cfg.smooth_window, 1) / 2);
  for (std::size_t k = 0; k + 1 < anchors.size(); ++k) {
    const std::size_t lo = anchors[k];
    const std::size_t hi = anchors[k + 1];
    for (std::size_t i = lo + 1; i < hi; ++i) {
      const std::size_t h = std::min({half, i - lo, hi - i});
      XY sum{};
      for (std::size_t j = i - h; j <= i + h; ++j) sum = sum + pts[j];
      smoothed[i] = sum * (1.0 / static_cast<double>(2 * h + 1));
    }
  }
  for (std::size_t i = 1; i < last; ++i) g.move_vertex(chain[i], smoothed[i]);

  std::vector<std::size_t> keep;
  for (std::size_t k = 0; k + 1 < anchors.size(); ++k) {
    const std::vector<XY> span(smoothed.begin() + anchors[k],
                               smoothed.begin() + anchors[k + 1] + 1);
    for (std::size_t idx : detail::douglas_peucker(span, cfg.simplify_tol)) {
      if (keep.empty() || keep.back() != anchors[k] + idx) keep.push_back(anchors[k] + idx);
    }
  }
  detail::simplify_chain(g, chain, keep, {support, Provenance::kRefined});
}

}  // namespace

void validate(const RefineConfig& cfg) {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(cfg.junction_snap) || !positive(cfg.simplify_tol) ||
      cfg.smooth_window < 1 || !positive(cfg.min_component_len) ||
      !positive(cfg.corner_angle)) {
    throw ConfigError("refine parameters must be positive");
  }
  if (cfg.smooth_window % 2 == 0) throw ConfigError("smooth_window must be odd");
}

RoadGraph snap_junctions(const RoadGraph& g, double snap) {
  RoadGraph out = g;
  while (true) {
    std::vector<VertexId> junctions;
    for (const auto& [id, pos] : out.vertices()) {
      if (out.degree(id) >= 3 && !base_attached(out, id)) junctions.push_back(id);
    }
    UnionFind uf(junctions.size());
    bool any = false;
    for (std::size_t i = 0; i < junctions.size(); ++i) {
      for (std::size_t j = i + 1; j < junctions.size(); ++j) {
        if (distance(out.position(junctions[i]), out.position(junctions[j])) <= snap) {
          uf.unite(i, j);
          any = true;
        }
      }
    }
    if (!any) break;

    std::map<std::size_t, std::vector<VertexId>> clusters;
    for (std::size_t i = 0; i < junctions.size(); ++i) {
      clusters[uf.find(i)].push_back(junctions[i]);
    }
    for (const auto& [root, members] : clusters) {
      if (members.size() < 2) continue;
      XY centroid{};
      for (VertexId m : members) centroid = centroid + out.position(m);
      centroid = centroid * (1.0 / static_cast<double>(members.size()));
      const VertexId target = members.front();
      for (std::size_t k = 1; k < members.size(); ++k) {
        const VertexId m = members[k];
        const std::set<VertexId> nbrs = out.neighbors(m);
        for (VertexId n : nbrs) {
          if (n == target) continue;
          const EdgeMeta meta = out.edge_meta(m, n);
          if (out.has_edge(target, n)) {
            EdgeMeta& existing = out.edge_meta(target, n);
            existing.support = std::max(existing.support, meta.support);
          } else {
            out.add_edge(target, n, meta);
          }
        }
        out.remove_vertex(m);
      }
      out.move_vertex(target, centroid);
    }
  }
  return out;
}

RoadGraph refine_geometry(const RoadGraph& g, const RefineConfig& cfg) {
  validate(cfg);
  RoadGraph out = snap_junctions(g, cfg.junction_snap);

  for (const auto& chain : detail::extract_chains(out)) refine_chain(out, chain, cfg);

  for (const auto& comp : connected_components(out)) {
    double len = 0.0;
    bool attached = false;
    for (VertexId v : comp) {
      for (VertexId n : out.neighbors(v)) {
        if (out.edge_meta(v, n).provenance == Provenance::kBaseMap) attached = true;
        if (v < n) len += distance(out.position(v), out.position(n));
      }
    }
    if (!attached && len < cfg.min_component_len) {
      for (VertexId v : comp) out.remove_vertex(v);
    }
  }
  return out;
}

RoadGraph merge_into_base(const RoadGraph& base, const RoadGraph& inferred_in,
                          const std::vector<EdgeKey>& accepted,
                          double weld_radius) {
  const RoadGraph inferred = reproject(inferred_in, base.projection());
  RoadGraph out = base;
  std::map<VertexId, VertexId> mapped;

  auto map_vertex = [&](VertexId v) {
    if (!inferred.has_vertex(v)) {
      throw IntegrityError("accepted segment references unknown vertex " +
                           std::to_string(v));
    }
    auto it = mapped.find(v);
    if (it != mapped.end()) return it->second;
    const XY p = inferred.position(v);
    VertexId target;
    if (auto hit = nearest_vertex(base, p, weld_radius)) {
      target = *hit;
    } else {
      target = out.add_vertex(p);
    }
    mapped.emplace(v, target);
    return target;
  };

  std::vector<EdgeKey> order = accepted;
  std::sort(order.begin(), order.end());
  for (const EdgeKey& e : order) {
    const VertexId a = map_vertex(e.a);
    const VertexId b = map_vertex(e.b);
    if (a == b) continue;
    EdgeMeta meta{0, Provenance::kTraced};
    if (inferred.has_edge(e.a, e.b)) meta = inferred.edge_meta(e.a, e.b);
    out.add_edge(a, b, meta);
  }
  return out;
}

}  // namespace roadtrace
