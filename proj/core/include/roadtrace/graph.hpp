#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "roadtrace/geo.hpp"

namespace roadtrace {

using VertexId = std::int64_t;

enum class Provenance { kTraced, kBaseline, kBaseMap, kRefined };

std::string_view to_string(Provenance p);
std::optional<Provenance> parse_provenance(std::string_view s);

// Unordered vertex pair, stored with a < b.
struct EdgeKey {
  VertexId a = 0;
  VertexId b = 0;

  EdgeKey() = default;
  EdgeKey(VertexId u, VertexId v) : a(u < v ? u : v), b(u < v ? v : u) {}

  VertexId other(VertexId v) const { return v == a ? b : a; }

  friend auto operator<=>(const EdgeKey&, const EdgeKey&) = default;
};

struct EdgeMeta {
  int support = 0;
  Provenance provenance = Provenance::kTraced;

  friend bool operator==(const EdgeMeta&, const EdgeMeta&) = default;
};

// Undirected planar road graph. Vertices keep their ids for life; the
// projection records which origin the XY coordinates are relative to.
class RoadGraph {
 public:
  RoadGraph() = default;
  explicit RoadGraph(Projection projection) : projection_(projection) {}

  const Projection& projection() const { return projection_; }
  void set_projection(const Projection& p) { projection_ = p; }

  // Throws IntegrityError on duplicate id or non-finite position.
  void add_vertex(VertexId id, XY pos);
  // Allocates max id + 1 (or 0 for an empty graph).
  VertexId add_vertex(XY pos);
  // Removes the vertex and every incident edge.
  void remove_vertex(VertexId id);
  void move_vertex(VertexId id, XY pos);

  // Returns false (and changes nothing) if the edge already exists. Throws
  // IntegrityError for self-loops or unknown endpoints.
  bool add_edge(VertexId u, VertexId v, EdgeMeta meta = {});
  bool remove_edge(VertexId u, VertexId v);

  bool has_vertex(VertexId id) const { return vertices_.count(id) != 0; }
  bool has_edge(VertexId u, VertexId v) const;
  XY position(VertexId id) const;
  const EdgeMeta& edge_meta(VertexId u, VertexId v) const;
  EdgeMeta& edge_meta(VertexId u, VertexId v);

  const std::map<VertexId, XY>& vertices() const { return vertices_; }
  const std::map<EdgeKey, EdgeMeta>& edges() const { return edges_; }
  const std::set<VertexId>& neighbors(VertexId id) const;

  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  std::size_t degree(VertexId id) const { return neighbors(id).size(); }
  bool empty() const { return vertices_.empty(); }

  double edge_length(const EdgeKey& e) const;
  double total_length() const;
  VertexId next_vertex_id() const;

  friend bool operator==(const RoadGraph& a, const RoadGraph& b) {
    return a.vertices_ == b.vertices_ && a.edges_ == b.edges_;
  }

 private:
  Projection projection_{};
  std::map<VertexId, XY> vertices_;
  std::map<EdgeKey, EdgeMeta> edges_;
  std::map<VertexId, std::set<VertexId>> adjacency_;
};

// Vertex sets of connected components, each sorted, ordered by smallest id.
std::vector<std::vector<VertexId>> connected_components(const RoadGraph& g);

bool path_exists(const RoadGraph& g, VertexId from, VertexId to);

// True if some vertex in `from` reaches some vertex in `to`.
bool any_path_between(const RoadGraph& g, const std::vector<VertexId>& from,
                      const std::vector<VertexId>& to);

bool has_cycle(const RoadGraph& g);

// Length-weighted single-source shortest paths. Among equal-length paths the
// predecessor settled first wins, so results are deterministic.
struct ShortestPathTree {
  VertexId source = 0;
  std::map<VertexId, double> dist;
  std::map<VertexId, VertexId> pred;
};

ShortestPathTree dijkstra(const RoadGraph& g, VertexId source);

// Vertex sequence source..target, or empty if target is unreachable.
std::vector<VertexId> path_to(const ShortestPathTree& tree, VertexId target);

// Re-expresses every vertex in another projection (through lon/lat).
RoadGraph reproject(const RoadGraph& g, const Projection& target);

// Nearest vertex at distance <= radius from p; ties go to the lower id.
std::optional<VertexId> nearest_vertex(const RoadGraph& g, XY p, double radius);

}  // namespace roadtrace
