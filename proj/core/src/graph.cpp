#include "roadtrace/graph.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>

#include "roadtrace/error.hpp"

namespace roadtrace {

namespace {

const std::set<VertexId> kNoNeighbors;

}  // namespace

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::kTraced:
      return "traced";
    case Provenance::kBaseline:
      return "baseline";
    case Provenance::kBaseMap:
      return "base-map";
    case Provenance::kRefined:
      return "refined";
  }
  return "traced";
}

std::optional<Provenance> parse_provenance(std::string_view s) {
  if (s == "traced") return Provenance::kTraced;
  if (s == "baseline") return Provenance::kBaseline;
  if (s == "base-map") return Provenance::kBaseMap;
  if (s == "refined") return Provenance::kRefined;
  return std::nullopt;
}

void RoadGraph::add_vertex(VertexId id, XY pos) {
  if (!std::isfinite(pos.x) || !std::isfinite(pos.y)) {
    throw IntegrityError("vertex " + std::to_string(id) +
                         " has a non-finite position");
  }
  if (!vertices_.emplace(id, pos).second) {
    throw IntegrityError("duplicate vertex id " + std::to_string(id));
  }
}

VertexId RoadGraph::add_vertex(XY pos) {
  const VertexId id = next_vertex_id();
  add_vertex(id, pos);
  return id;
}

void RoadGraph::remove_vertex(VertexId id) {
  auto adj = adjacency_.find(id);
  if (adj != adjacency_.end()) {
    for (VertexId n : adj->second) {
      edges_.erase(EdgeKey(id, n));
      adjacency_[n].erase(id);
    }
    adjacency_.erase(adj);
  }
  vertices_.erase(id);
}

void RoadGraph::move_vertex(VertexId id, XY pos) {
  auto it = vertices_.find(id);
  if (it == vertices_.end()) {
    throw IntegrityError("unknown vertex " + std::to_string(id));
  }
  it->second = pos;
}

bool RoadGraph::add_edge(VertexId u, VertexId v, EdgeMeta meta) {
  if (u == v) {
    throw IntegrityError("self-loop at vertex " + std::to_string(u));
  }
  if (!has_vertex(u) || !has_vertex(v)) {
    throw IntegrityError("edge references unknown vertex " +
                         std::to_string(has_vertex(u) ? v : u));
  }
  if (!edges_.emplace(EdgeKey(u, v), meta).second) return false;
  adjacency_[u].insert(v);
  adjacency_[v].insert(u);
  return true;
}

bool RoadGraph::remove_edge(VertexId u, VertexId v) {
  if (edges_.erase(EdgeKey(u, v)) == 0) return false;
  adjacency_[u].erase(v);
  adjacency_[v].erase(u);
  return true;
}

bool RoadGraph::has_edge(VertexId u, VertexId v) const {
  return edges_.count(EdgeKey(u, v)) != 0;
}

XY RoadGraph::position(VertexId id) const {
  auto it = vertices_.find(id);
  if (it == vertices_.end()) {
    throw IntegrityError("unknown vertex " + std::to_string(id));
  }
  return it->second;
}

const EdgeMeta& RoadGraph::edge_meta(VertexId u, VertexId v) const {
  auto it = edges_.find(EdgeKey(u, v));
  if (it == edges_.end()) {
    throw IntegrityError("unknown edge " + std::to_string(u) + "-" +
                         std::to_string(v));
  }
  return it->second;
}

EdgeMeta& RoadGraph::edge_meta(VertexId u, VertexId v) {
  auto it = edges_.find(EdgeKey(u, v));
  if (it == edges_.end()) {
    throw IntegrityError("unknown edge " + std::to_string(u) + "-" +
                         std::to_string(v));
  }
  return it->second;
}

const std::set<VertexId>& RoadGraph::neighbors(VertexId id) const {
  auto it = adjacency_.find(id);
  return it == adjacency_.end() ? kNoNeighbors : it->second;
}

double RoadGraph::edge_length(const EdgeKey& e) const {
  return distance(position(e.a), position(e.b));
}

double RoadGraph::total_length() const {
  double sum = 0.0;
  for (const auto& [key, meta] : edges_) sum += edge_length(key);
  return sum;
}

VertexId RoadGraph::next_vertex_id() const {
  return vertices_.empty() ? 0 : vertices_.rbegin()->first + 1;
}

std::vector<std::vector<VertexId>> connected_components(const RoadGraph& g) {
  std::vector<std::vector<VertexId>> out;
  std::set<VertexId> seen;
  for (const auto& [start, pos] : g.vertices()) {
    if (seen.count(start)) continue;
    std::vector<VertexId> comp;
    std::queue<VertexId> q;
    q.push(start);
    seen.insert(start);
    while (!q.empty()) {
      VertexId v = q.front();
      q.pop();
      comp.push_back(v);
      for (VertexId n : g.neighbors(v)) {
        if (seen.insert(n).second) q.push(n);
      }
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

bool any_path_between(const RoadGraph& g, const std::vector<VertexId>& from,
                      const std::vector<VertexId>& to) {
  std::set<VertexId> targets(to.begin(), to.end());
  std::set<VertexId> seen;
  std::queue<VertexId> q;
  for (VertexId v : from) {
    if (!g.has_vertex(v)) continue;
    if (seen.insert(v).second) q.push(v);
  }
  while (!q.empty()) {
    VertexId v = q.front();
    q.pop();
    if (targets.count(v)) return true;
    for (VertexId n : g.neighbors(v)) {
      if (seen.insert(n).second) q.push(n);
    }
  }
  return false;
}

bool path_exists(const RoadGraph& g, VertexId from, VertexId to) {
  return any_path_between(g, {from}, {to});
}

bool has_cycle(const RoadGraph& g) {
  // An undirected graph is a forest iff |E| = |V| - #components.
  const auto comps = connected_components(g);
  return g.edge_count() + comps.size() > g.vertex_count();
}

ShortestPathTree dijkstra(const RoadGraph& g, VertexId source) {
  ShortestPathTree tree;
  tree.source = source;
  if (!g.has_vertex(source)) return tree;
  using Item = std::pair<double, VertexId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  std::set<VertexId> settled;
  tree.dist[source] = 0.0;
  heap.push({0.0, source});
  while (!heap.empty()) {
    auto [d, v] = heap.top();
    heap.pop();
    if (!settled.insert(v).second) continue;
    for (VertexId n : g.neighbors(v)) {
      if (settled.count(n)) continue;
      const double nd = d + distance(g.position(v), g.position(n));
      auto it = tree.dist.find(n);
      if (it == tree.dist.end() || nd < it->second) {
        tree.dist[n] = nd;
        tree.pred[n] = v;
        heap.push({nd, n});
      }
    }
  }
  return tree;
}

std::vector<VertexId> path_to(const ShortestPathTree& tree, VertexId target) {
  if (!tree.dist.count(target)) return {};
  std::vector<VertexId> path{target};
  while (path.back() != tree.source) path.push_back(tree.pred.at(path.back()));
  std::reverse(path.begin(), path.end());
  return path;
}

RoadGraph reproject(const RoadGraph& g, const Projection& target) {
  if (g.projection() == target) return g;
  RoadGraph out(target);
  for (const auto& [id, pos] : g.vertices()) {
    out.add_vertex(id, target.project(g.projection().unproject(pos)));
  }
  for (const auto& [key, meta] : g.edges()) out.add_edge(key.a, key.b, meta);
  return out;
}

std::optional<VertexId> nearest_vertex(const RoadGraph& g, XY p,
                                       double radius) {
  std::optional<VertexId> best;
  double best_d = radius;
  for (const auto& [id, pos] : g.vertices()) {
    const double d = distance(p, pos);
    if (d < best_d || (d == best_d && !best)) {
      best_d = d;
      best = id;
    }
  }
  return best;
}

}  // namespace roadtrace
