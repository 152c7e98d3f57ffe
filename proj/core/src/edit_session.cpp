#include "roadtrace/edit_session.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include <nlohmann/json.hpp>

#include "roadtrace/error.hpp"
#include "roadtrace/refine.hpp"

namespace roadtrace::edit {

namespace {

constexpr std::size_t kMaxGatePairs = 200;

double now_seconds() {
  using namespace std::chrono;
  return duration<double>(system_clock::now().time_since_epoch()).count();
}

// Vertex lookup by proximity, cell size = query radius.
class VertexGrid {
 public:
  VertexGrid(const RoadGraph& g, double radius) : g_(g), cell_(radius) {
    for (const auto& [id, pos] : g.vertices()) cells_[cell_of(pos)].push_back(id);
  }

  std::vector<VertexId> within(XY p, double r) const {
    std::vector<VertexId> out;
    const auto c = cell_of(p);
    for (long long dx = -1; dx <= 1; ++dx) {
      for (long long dy = -1; dy <= 1; ++dy) {
        auto it = cells_.find({c.first + dx, c.second + dy});
        if (it == cells_.end()) continue;
        for (VertexId v : it->second) {
          if (distance(g_.position(v), p) <= r) out.push_back(v);
        }
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  std::pair<long long, long long> cell_of(XY p) const {
    return {static_cast<long long>(std::floor(p.x / cell_)),
            static_cast<long long>(std::floor(p.y / cell_))};
  }

  const RoadGraph& g_;
  double cell_;
  std::map<std::pair<long long, long long>, std::vector<VertexId>> cells_;
};

}  // namespace

std::string_view to_string(SegmentStatus s) {
  switch (s) {
    case SegmentStatus::kPending:
      return "pending";
    case SegmentStatus::kAccepted:
      return "accepted";
    case SegmentStatus::kRejected:
      return "rejected";
  }
  return "pending";
}

std::string_view to_string(EditAction a) {
  switch (a) {
    case EditAction::kAccept:
      return "accept";
    case EditAction::kReject:
      return "reject";
    case EditAction::kTeleport:
      return "teleport";
  }
  return "accept";
}

std::optional<EditAction> parse_action(std::string_view s) {
  if (s == "accept") return EditAction::kAccept;
  if (s == "reject") return EditAction::kReject;
  if (s == "teleport") return EditAction::kTeleport;
  return std::nullopt;
}

std::string to_json_line(const LogEntry& e) {
  nlohmann::ordered_json j;
  j["time"] = e.time;
  j["segment"] = e.segment;
  j["action"] = std::string(to_string(e.action));
  j["source"] = e.source;
  return j.dump();
}

LogEntry parse_log_line(std::string_view line) {
  const auto j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ParseError(0, "malformed action log line");
  LogEntry e;
  try {
    e.time = j.at("time").get<double>();
    e.segment = j.at("segment").get<SegmentId>();
    auto a = parse_action(j.at("action").get<std::string>());
    if (!a) throw ParseError(0, "unknown action in log");
    e.action = *a;
    e.source = j.value("source", std::string("user"));
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(0, std::string("malformed action log line: ") + ex.what());
  }
  return e;
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

Session::Session(std::string id, RoadGraph base, RoadGraph inferred, SessionConfig cfg)
    : id_(std::move(id)), cfg_(cfg), base_(std::move(base)), inferred_(std::move(inferred)) {
  if (!(base_.projection() == inferred_.projection())) {
    throw ConfigError("base and inferred graphs use different projections");
  }

  // Overlay: inferred edges with no base edge matching both endpoints.
  const VertexGrid base_grid(base_, cfg_.merge_radius);
  SegmentId next = 0;
  for (const auto& [key, meta] : inferred_.edges()) {
    const XY pa = inferred_.position(key.a);
    const XY pb = inferred_.position(key.b);
    bool in_base = false;
    for (VertexId c : base_grid.within(pa, cfg_.merge_radius)) {
      for (VertexId d : base_.neighbors(c)) {
        if (distance(base_.position(d), pb) <= cfg_.merge_radius) in_base = true;
      }
    }
    if (!in_base) overlay_.push_back({next++, key, SegmentStatus::kPending, meta.support});
  }

  // Teleport order: overlay components by total length desc, then by their
  // smallest segment id.
  RoadGraph overlay_graph(inferred_.projection());
  std::map<EdgeKey, SegmentId> by_edge;
  for (const auto& s : overlay_) {
    for (VertexId v : {s.edge.a, s.edge.b}) {
      if (!overlay_graph.has_vertex(v)) overlay_graph.add_vertex(v, inferred_.position(v));
    }
    overlay_graph.add_edge(s.edge.a, s.edge.b);
    by_edge[s.edge] = s.id;
  }
  for (const auto& comp : connected_components(overlay_graph)) {
    Component c;
    for (VertexId v : comp) {
      for (VertexId n : overlay_graph.neighbors(v)) {
        if (v < n) {
          c.segments.push_back(by_edge.at(EdgeKey(v, n)));
          c.length += overlay_graph.edge_length(EdgeKey(v, n));
        }
      }
    }
    std::sort(c.segments.begin(), c.segments.end());
    components_.push_back(std::move(c));
  }
  std::sort(components_.begin(), components_.end(),
            [](const Component& a, const Component& b) {
              if (a.length != b.length) return a.length > b.length;
              return a.segments.front() < b.segments.front();
            });
}

const OverlaySegment& Session::segment(SegmentId id) const {
  if (id < 0 || id >= static_cast<SegmentId>(overlay_.size())) {
    throw NotFound("unknown segment " + std::to_string(id));
  }
  return overlay_[static_cast<std::size_t>(id)];
}

OverlaySegment& Session::mutable_segment(SegmentId id) {
  return const_cast<OverlaySegment&>(segment(id));
}

void Session::append(LogEntry e) {
  log_.push_back(std::move(e));
  if (sink_) sink_(log_.back());
}

const OverlaySegment& Session::set_status(SegmentId id, EditAction action) {
  if (action == EditAction::kTeleport) throw ConfigError("teleport is not a status");
  OverlaySegment& s = mutable_segment(id);
  s.status = action == EditAction::kAccept ? SegmentStatus::kAccepted
                                           : SegmentStatus::kRejected;
  append({now_seconds(), id, action, "user"});
  return s;
}

double Session::segment_length(const OverlaySegment& s) const {
  return inferred_.edge_length(s.edge);
}

std::vector<SegmentId> Session::prune(const PruneParams& params) {
  RoadGraph pending(inferred_.projection());
  std::map<EdgeKey, SegmentId> by_edge;
  for (const auto& s : overlay_) {
    if (s.status != SegmentStatus::kPending) continue;
    for (VertexId v : {s.edge.a, s.edge.b}) {
      if (!pending.has_vertex(v)) pending.add_vertex(v, inferred_.position(v));
    }
    pending.add_edge(s.edge.a, s.edge.b);
    by_edge[s.edge] = s.id;
  }

  const VertexGrid base_grid(base_, cfg_.merge_radius);
  std::mt19937_64 rng(fnv1a(id_));
  std::set<SegmentId> rejected;

  for (const auto& comp : connected_components(pending)) {
    std::vector<EdgeKey> edges;
    double length = 0.0;
    for (VertexId v : comp) {
      for (VertexId n : pending.neighbors(v)) {
        if (v < n) {
          edges.emplace_back(v, n);
          length += pending.edge_length(EdgeKey(v, n));
        }
      }
    }

    std::vector<VertexId> gates;
    for (VertexId v : comp) {
      if (!base_grid.within(pending.position(v), cfg_.merge_radius).empty()) {
        gates.push_back(v);
      }
    }
    std::map<VertexId, ShortestPathTree> trees;
    auto tree_of = [&](VertexId v) -> const ShortestPathTree& {
      auto it = trees.find(v);
      if (it == trees.end()) it = trees.emplace(v, dijkstra(pending, v)).first;
      return it->second;
    };
    if (gates.size() < 2) {
      // Fall back to the component's two farthest-apart vertices.
      double best = -1.0;
      std::pair<VertexId, VertexId> ends{comp.front(), comp.front()};
      for (VertexId u : comp) {
        for (const auto& [v, d] : tree_of(u).dist) {
          if (u < v && d > best) {
            best = d;
            ends = {u, v};
          }
        }
      }
      gates = {ends.first, ends.second};
    }

    std::vector<std::pair<VertexId, VertexId>> pairs;
    for (std::size_t i = 0; i < gates.size(); ++i) {
      for (std::size_t j = i + 1; j < gates.size(); ++j) pairs.emplace_back(gates[i], gates[j]);
    }
    if (pairs.size() > kMaxGatePairs) {
      std::vector<std::pair<VertexId, VertexId>> sampled;
      std::sample(pairs.begin(), pairs.end(), std::back_inserter(sampled), kMaxGatePairs, rng);
      pairs = std::move(sampled);
    }

    std::map<EdgeKey, int> importance;
    for (const auto& [s, t] : pairs) {
      const auto path = path_to(tree_of(s), t);
      for (std::size_t i = 0; i + 1 < path.size(); ++i) ++importance[EdgeKey(path[i], path[i + 1])];
    }

    const bool too_short = length < params.min_component_len;
    for (const EdgeKey& e : edges) {
      const int imp = importance.count(e) ? importance.at(e) : 0;
      if (too_short || imp < params.keep_importance_min) rejected.insert(by_edge.at(e));
    }
  }

  const double t = now_seconds();
  for (SegmentId id : rejected) {
    mutable_segment(id).status = SegmentStatus::kRejected;
    append({t, id, EditAction::kReject, "prune"});
  }
  return {rejected.begin(), rejected.end()};
}

TeleportResult Session::teleport_internal() {
  TeleportResult r;
  const std::size_t n = components_.size();
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t idx = (cursor_ + k) % n;
    const Component& c = components_[idx];
    const bool has_pending = std::any_of(c.segments.begin(), c.segments.end(), [&](SegmentId id) {
      return overlay_[static_cast<std::size_t>(id)].status == SegmentStatus::kPending;
    });
    if (!has_pending) continue;

    r.empty = false;
    r.segments = c.segments;
    r.size_m = c.length;
    bool first = true;
    XY sum{};
    std::set<VertexId> verts;
    for (SegmentId id : c.segments) {
      const EdgeKey& e = overlay_[static_cast<std::size_t>(id)].edge;
      verts.insert(e.a);
      verts.insert(e.b);
    }
    for (VertexId v : verts) {
      const XY p = inferred_.position(v);
      if (first) {
        r.bbox_min = r.bbox_max = p;
        first = false;
      }
      r.bbox_min = {std::min(r.bbox_min.x, p.x), std::min(r.bbox_min.y, p.y)};
      r.bbox_max = {std::max(r.bbox_max.x, p.x), std::max(r.bbox_max.y, p.y)};
      sum = sum + p;
    }
    r.centroid = sum * (1.0 / static_cast<double>(verts.size()));
    cursor_ = (idx + 1) % n;
    return r;
  }
  return r;
}

TeleportResult Session::teleport() {
  TeleportResult r = teleport_internal();
  if (!r.empty) append({now_seconds(), -1, EditAction::kTeleport, "user"});
  return r;
}

RoadGraph Session::export_graph() const {
  std::vector<EdgeKey> accepted;
  for (const auto& s : overlay_) {
    if (s.status == SegmentStatus::kAccepted) accepted.push_back(s.edge);
  }
  return merge_into_base(base_, inferred_, accepted, cfg_.weld_radius);
}

void Session::replay(const std::vector<LogEntry>& entries) {
  for (const LogEntry& e : entries) {
    if (e.action == EditAction::kTeleport) {
      teleport_internal();
    } else {
      mutable_segment(e.segment).status = e.action == EditAction::kAccept
                                              ? SegmentStatus::kAccepted
                                              : SegmentStatus::kRejected;
    }
    log_.push_back(e);
  }
}

std::size_t Session::count(SegmentStatus s) const {
  return static_cast<std::size_t>(std::count_if(
      overlay_.begin(), overlay_.end(), [&](const OverlaySegment& o) { return o.status == s; }));
}

Session create_session(std::string id, RoadGraph base, RoadGraph inferred, SessionConfig cfg) {
  return Session(std::move(id), std::move(base), std::move(inferred), cfg);
}

}  // namespace roadtrace::edit
