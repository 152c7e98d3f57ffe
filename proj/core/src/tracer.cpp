#include "roadtrace/tracer.hpp"

#include <algorithm>
#include <cmath>

#include "roadtrace/error.hpp"

namespace roadtrace {

namespace {

constexpr int kPeakHalfWidth = 2;

// Point where the segment from `inside` (within r of c) to `outside`
// (beyond r) crosses the circle of radius r about c.
XY circle_exit(XY c, double r, XY inside, XY outside) {
  const XY d = outside - inside;
  const XY f = inside - c;
  const double a = dot(d, d);
  const double b = 2.0 * dot(f, d);
  const double cc = dot(f, f) - r * r;
  const double disc = std::max(0.0, b * b - 4.0 * a * cc);
  const double t = std::clamp((-b + std::sqrt(disc)) / (2.0 * a), 0.0, 1.0);
  return inside + d * t;
}

// Walks from `from` in steps of `dir` until a point lies beyond r. Returns
// the crossing point on the circle, or nothing if the trajectory ends first.
std::optional<XY> walk_out(const std::vector<TrajPoint>& pts, std::size_t from,
                           int dir, XY c, double r) {
  std::size_t prev = from;
  while (true) {
    if (dir > 0 ? prev + 1 >= pts.size() : prev == 0) return std::nullopt;
    const std::size_t next = dir > 0 ? prev + 1 : prev - 1;
    if (distance(pts[next].pos, c) > r) {
      return circle_exit(c, r, pts[prev].pos, pts[next].pos);
    }
    prev = next;
  }
}

bool near_any(double deg, std::span<const double> bearings, double halfwidth) {
  return std::any_of(bearings.begin(), bearings.end(), [&](double b) {
    return angular_difference(deg, b) <= halfwidth;
  });
}

// True if p lies near an edge parallel to `heading` that does not touch v.
bool duplicates_edge(const RoadGraph& g, VertexId v, XY p, double heading,
                     const TraceConfig& cfg) {
  for (const auto& [k, m] : g.edges()) {
    if (k.a == v || k.b == v) continue;
    const XY a = g.position(k.a), b = g.position(k.b);
    if (point_segment_distance(p, a, b) > cfg.merge_radius) continue;
    const double e = bearing(a, b);
    if (std::min(angular_difference(heading, e),
                 angular_difference(heading, e + 180.0)) <= cfg.exclusion_halfwidth) {
      return true;
    }
  }
  return false;
}

}  // namespace

void validate(const TraceConfig& cfg) {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (cfg.n_bins < 8) throw ConfigError("n_bins must be >= 8");
  if (!positive(cfg.step_d) || !positive(cfg.r_match) || !positive(cfg.r_hist) ||
      !positive(cfg.merge_radius)) {
    throw ConfigError("tracer distances must be positive");
  }
  if (!(cfg.smooth_sigma_bins >= 0.0) || !(cfg.conf_threshold >= 0.0) ||
      !(cfg.exclusion_halfwidth >= 0.0) || cfg.max_iterations < 0) {
    throw ConfigError("tracer thresholds must be non-negative");
  }
  if (!(cfg.step_d > cfg.merge_radius)) {
    throw ConfigError("step_d must exceed merge_radius");
  }
  if (!(cfg.r_hist > cfg.r_match)) throw ConfigError("r_hist must exceed r_match");
}

std::vector<double> smooth_circular(const std::vector<int>& raw,
                                    double sigma_bins) {
  const int n = static_cast<int>(raw.size());
  std::vector<double> out(raw.size(), 0.0);
  if (n == 0) return out;
  const int half = sigma_bins > 0.0 ? static_cast<int>(std::ceil(3.0 * sigma_bins)) : 0;
  std::vector<double> kernel(2 * half + 1);
  double sum = 0.0;
  for (int o = -half; o <= half; ++o) {
    const double w = sigma_bins > 0.0
                         ? std::exp(-0.5 * o * o / (sigma_bins * sigma_bins))
                         : 1.0;
    kernel[o + half] = w;
    sum += w;
  }
  for (double& w : kernel) w /= sum;
  for (int j = 0; j < n; ++j) {
    double acc = 0.0;
    for (int o = -half; o <= half; ++o) {
      const int src = (((j - o) % n) + n) % n;
      acc += kernel[o + half] * raw[src];
    }
    out[j] = acc;
  }
  return out;
}

PolarHistogram compute_polar_histogram(const TrajIndex& index, XY center,
                                       const TraceConfig& cfg,
                                       std::span<const double> arrival_bearings) {
  PolarHistogram h;
  h.raw_counts.assign(cfg.n_bins, 0);
  const auto& trajs = index.trajectories();
  for (const Crossing& c : query_crossings(index, center, cfg.r_match)) {
    const auto& pts = trajs[c.traj].points;
    const int dir = c.orientation == Orientation::kForward ? 1 : -1;
    const auto exit = walk_out(pts, c.enter_index, dir, center, cfg.r_hist);
    if (!exit) continue;
    if (!arrival_bearings.empty()) {
      const auto entry = walk_out(pts, c.enter_index, -dir, center, cfg.r_hist);
      if (entry && !near_any(bearing(center, *entry), arrival_bearings,
                             cfg.exclusion_halfwidth)) {
        continue;
      }
    }
    ++h.raw_counts[angle_to_bin(bearing(center, *exit), cfg.n_bins)];
  }
  h.bins = smooth_circular(h.raw_counts, cfg.smooth_sigma_bins);
  return h;
}

std::vector<Peak> find_unexplored_peaks(const PolarHistogram& h,
                                        std::span<const double> explored,
                                        const TraceConfig& cfg) {
  const int n = h.n_bins();
  std::vector<Peak> peaks;
  for (int j = 0; j < n; ++j) {
    if (!(h.bins[j] > 0.0)) continue;
    bool is_max = true;
    double mass = 0.0;
    for (int o = -kPeakHalfWidth; o <= kPeakHalfWidth; ++o) {
      const int i = (((j + o) % n) + n) % n;
      mass += h.raw_counts[i];
      if (i == j) continue;
      // Plateaus resolve toward the lower bin index.
      if (h.bins[i] > h.bins[j] || (h.bins[i] == h.bins[j] && i < j)) {
        is_max = false;
      }
    }
    if (!is_max || mass < cfg.conf_threshold) continue;
    if (near_any(bin_center(j, n), explored, cfg.exclusion_halfwidth)) continue;
    peaks.push_back({j, mass});
  }
  std::sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) {
    return a.confidence != b.confidence ? a.confidence > b.confidence : a.bin < b.bin;
  });
  return peaks;
}

PolarHistogram GpsOracle::evaluate(const RoadGraph& g, VertexId v) const {
  const std::vector<double> arrivals = explored_bearings(g, v);
  return compute_polar_histogram(index_, g.position(v), cfg_, arrivals);
}

bool ConfidenceOracle::supports_link(const RoadGraph&, VertexId, VertexId) const {
  return true;
}

bool GpsOracle::supports_link(const RoadGraph& g, VertexId from, VertexId to) const {
  const XY at = g.position(to);
  const XY src = g.position(from);
  if (g.degree(to) == 0 || at == src) return true;
  const double arrival = bearing(at, src);
  std::vector<double> onward;
  for (double b : explored_bearings(g, to)) {
    if (angular_difference(b, arrival) > cfg_.exclusion_halfwidth) onward.push_back(b);
  }
  if (onward.empty()) return true;

  const double arrivals[] = {arrival};
  const PolarHistogram h = compute_polar_histogram(index_, at, cfg_, arrivals);
  for (double b : onward) {
    int mass = 0;
    for (int j = 0; j < h.n_bins(); ++j) {
      if (angular_difference(bin_center(j, h.n_bins()), b) <= cfg_.exclusion_halfwidth) {
        mass += h.raw_counts[j];
      }
    }
    if (mass >= cfg_.conf_threshold) return true;
  }
  return false;
}

std::vector<double> explored_bearings(const RoadGraph& g, VertexId v,
                                      const ExploredMarks* marks) {
  std::vector<double> out;
  const XY p = g.position(v);
  for (VertexId n : g.neighbors(v)) {
    const XY q = g.position(n);
    if (q != p) out.push_back(bearing(p, q));
  }
  if (marks) {
    auto it = marks->find(v);
    if (it != marks->end()) out.insert(out.end(), it->second.begin(), it->second.end());
  }
  return out;
}

namespace {

// Best peak of one vertex, if any.
std::optional<Peak> vertex_best(const RoadGraph& g, VertexId v,
                                const PolarHistogram& h, const TraceConfig& cfg,
                                const ExploredMarks* marks) {
  const auto explored = explored_bearings(g, v, marks);
  auto peaks = find_unexplored_peaks(h, explored, cfg);
  if (peaks.empty()) return std::nullopt;
  return peaks.front();
}

// Keeps the lexicographically best (confidence desc, vertex asc, bin asc)
// action; callers visit vertices in ascending id order.
void offer(std::optional<TraceAction>& best, VertexId v, const Peak& p) {
  if (!best || p.confidence > best->confidence) best = TraceAction{v, p.bin, p.confidence};
}

}  // namespace

std::optional<TraceAction> best_action(const RoadGraph& g,
                                       const std::set<VertexId>& frontier,
                                       const ConfidenceOracle& oracle,
                                       const TraceConfig& cfg,
                                       const ExploredMarks* marks) {
  std::optional<TraceAction> best;
  for (VertexId v : frontier) {
    if (!g.has_vertex(v)) continue;
    if (auto p = vertex_best(g, v, oracle.evaluate(g, v), cfg, marks)) offer(best, v, *p);
  }
  return best;
}

StepResult apply_step(RoadGraph& g, const TraceAction& action,
                      const TraceConfig& cfg, const ConfidenceOracle* oracle) {
  const XY from = g.position(action.vertex);
  const double rad = bin_center(action.bin, cfg.n_bins) * kPi / 180.0;
  const XY candidate = from + XY{std::cos(rad), std::sin(rad)} * cfg.step_d;
  const EdgeMeta meta{static_cast<int>(std::lround(action.confidence)),
                      Provenance::kTraced};

  if (auto hit = nearest_vertex(g, candidate, cfg.merge_radius)) {
    if (*hit == action.vertex || g.has_edge(action.vertex, *hit)) {
      return {*hit, false, false};
    }
    if (!oracle || oracle->supports_link(g, action.vertex, *hit)) {
      g.add_edge(action.vertex, *hit, meta);
      return {*hit, false, true};
    }
  }
  if (duplicates_edge(g, action.vertex, candidate, rad * 180.0 / kPi, cfg)) {
    return {action.vertex, false, false};
  }
  const VertexId id = g.add_vertex(candidate);
  g.add_edge(action.vertex, id, meta);
  return {id, true, true};
}

std::vector<XY> detect_seeds(const TrajIndex& index, const TraceConfig& cfg,
                             std::size_t k) {
  struct Cell {
    std::set<std::size_t> trajs;
    XY sum{};
    std::size_t points = 0;
  };
  std::map<CellKey, Cell> cells;
  const double size = cfg.r_hist;
  const auto& trajs = index.trajectories();
  for (std::size_t t = 0; t < trajs.size(); ++t) {
    for (const auto& p : trajs[t].points) {
      const CellKey key{static_cast<std::int64_t>(std::floor(p.pos.x / size)),
                        static_cast<std::int64_t>(std::floor(p.pos.y / size))};
      Cell& c = cells[key];
      c.trajs.insert(t);
      c.sum = c.sum + p.pos;
      ++c.points;
    }
  }
  std::vector<std::pair<std::size_t, XY>> ranked;
  for (const auto& [key, c] : cells) {
    ranked.emplace_back(c.trajs.size(), c.sum * (1.0 / static_cast<double>(c.points)));
  }
  // Stable sort keeps cell-key order among equal counts.
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });

  std::vector<XY> seeds;
  for (const auto& [count, pos] : ranked) {
    if (seeds.size() >= k) break;
    const bool suppressed = std::any_of(seeds.begin(), seeds.end(), [&](XY s) {
      return distance(s, pos) < 2.0 * cfg.r_hist;
    });
    if (!suppressed) seeds.push_back(pos);
  }
  return seeds;
}

std::string to_string(StopReason r) {
  return r == StopReason::kConverged ? "converged" : "max_iterations";
}

TraceResult trace(const RoadGraph& base, const std::vector<XY>& seeds,
                  const ConfidenceOracle& oracle, const TraceConfig& cfg) {
  validate(cfg);
  TraceResult result{base, 0, 0, StopReason::kConverged};
  RoadGraph& g = result.graph;

  std::set<VertexId> frontier;
  for (const auto& [id, pos] : g.vertices()) frontier.insert(id);
  for (const XY& s : seeds) {
    if (auto hit = nearest_vertex(g, s, cfg.merge_radius)) {
      frontier.insert(*hit);
    } else {
      frontier.insert(g.add_vertex(s));
    }
  }

  ExploredMarks marks;
  std::map<VertexId, PolarHistogram> cache;
  const double invalidate_radius = cfg.r_hist + cfg.step_d;

  while (true) {
    std::optional<TraceAction> best;
    std::vector<VertexId> exhausted;
    for (VertexId v : frontier) {
      auto it = cache.find(v);
      if (it == cache.end()) it = cache.emplace(v, oracle.evaluate(g, v)).first;
      if (auto p = vertex_best(g, v, it->second, cfg, &marks)) {
        offer(best, v, *p);
      } else {
        // Nothing left here unless a nearby change invalidates the cache.
        exhausted.push_back(v);
      }
    }
    for (VertexId v : exhausted) frontier.erase(v);
    if (!best) break;
    if (result.iterations >= cfg.max_iterations) {
      result.stop_reason = StopReason::kMaxIterations;
      break;
    }

    ++result.iterations;
    const StepResult step = apply_step(g, *best, cfg, &oracle);
    if (step.added_edge) {
      ++result.edges_added;
    } else {
      marks[best->vertex].push_back(bin_center(best->bin, cfg.n_bins));
    }
    frontier.insert(best->vertex);
    frontier.insert(step.target);

    const XY a = g.position(best->vertex);
    const XY b = g.position(step.target);
    for (const auto& [id, pos] : g.vertices()) {
      if (distance(pos, a) <= invalidate_radius ||
          distance(pos, b) <= invalidate_radius) {
        if (cache.erase(id)) frontier.insert(id);
      }
    }
  }
  return result;
}

}  // namespace roadtrace
