#include "roadtrace/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <nlohmann/json.hpp>

namespace roadtrace {

namespace {

// Buckets edges by every cell their bounding box overlaps.
class SegmentGrid {
 public:
  SegmentGrid(const RoadGraph& g, double cell) : cell_(cell) {
    for (const auto& [key, meta] : g.edges()) {
      const XY a = g.position(key.a);
      const XY b = g.position(key.b);
      const std::size_t idx = segs_.size();
      segs_.push_back({a, b});
      const auto lo = cell_of({std::min(a.x, b.x), std::min(a.y, b.y)});
      const auto hi = cell_of({std::max(a.x, b.x), std::max(a.y, b.y)});
      for (auto cx = lo.first; cx <= hi.first; ++cx) {
        for (auto cy = lo.second; cy <= hi.second; ++cy) cells_[{cx, cy}].push_back(idx);
      }
    }
  }

  bool any_within(XY p, double d) const {
    const auto lo = cell_of({p.x - d, p.y - d});
    const auto hi = cell_of({p.x + d, p.y + d});
    for (auto cx = lo.first; cx <= hi.first; ++cx) {
      for (auto cy = lo.second; cy <= hi.second; ++cy) {
        auto it = cells_.find({cx, cy});
        if (it == cells_.end()) continue;
        for (std::size_t s : it->second) {
          if (point_segment_distance(p, segs_[s].first, segs_[s].second) <= d) return true;
        }
      }
    }
    return false;
  }

 private:
  std::pair<long long, long long> cell_of(XY p) const {
    return {static_cast<long long>(std::floor(p.x / cell_)),
            static_cast<long long>(std::floor(p.y / cell_))};
  }

  double cell_;
  std::vector<std::pair<XY, XY>> segs_;
  std::map<std::pair<long long, long long>, std::vector<std::size_t>> cells_;
};

std::size_t count_matched(const std::vector<XY>& samples, const RoadGraph& other,
                          double d_match) {
  if (other.edge_count() == 0) return 0;
  const SegmentGrid grid(other, d_match);
  std::size_t n = 0;
  for (const XY& p : samples) n += grid.any_within(p, d_match);
  return n;
}

}  // namespace

std::vector<XY> sample_edges(const RoadGraph& g, double spacing) {
  std::vector<XY> out;
  for (const auto& [id, pos] : g.vertices()) {
    if (g.degree(id) > 0) out.push_back(pos);
  }
  for (const auto& [key, meta] : g.edges()) {
    const XY a = g.position(key.a);
    const XY b = g.position(key.b);
    const double len = distance(a, b);
    const auto k = std::max<long long>(1, static_cast<long long>(std::ceil(len / spacing - 1e-9)));
    for (long long i = 1; i < k; ++i) {
      out.push_back(a + (b - a) * (static_cast<double>(i) / static_cast<double>(k)));
    }
  }
  return out;
}

EvalReport geo_precision_recall(const RoadGraph& inferred_in, const RoadGraph& truth,
                                const EvalConfig& cfg) {
  const RoadGraph inferred = reproject(inferred_in, truth.projection());
  const auto inf_samples = sample_edges(inferred, cfg.sample_spacing);
  const auto truth_samples = sample_edges(truth, cfg.sample_spacing);

  EvalReport r;
  r.inferred_total = inf_samples.size();
  r.truth_total = truth_samples.size();
  r.inferred_matched = count_matched(inf_samples, truth, cfg.d_match);
  r.truth_matched = count_matched(truth_samples, inferred, cfg.d_match);

  if (r.inferred_total == 0) {
    r.precision = 1.0;
  } else {
    r.precision = static_cast<double>(r.inferred_matched) / static_cast<double>(r.inferred_total);
  }
  if (r.truth_total == 0) {
    r.recall = 1.0;
    if (r.inferred_total > 0) r.precision = 0.0;
  } else if (r.inferred_total == 0) {
    r.recall = 0.0;
  } else {
    r.recall = static_cast<double>(r.truth_matched) / static_cast<double>(r.truth_total);
  }
  r.f1 = r.precision + r.recall > 0.0
             ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
             : 0.0;
  return r;
}

std::string to_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["precision"] = r.precision;
  j["recall"] = r.recall;
  j["f1"] = r.f1;
  j["inferred_matched"] = r.inferred_matched;
  j["inferred_total"] = r.inferred_total;
  j["truth_matched"] = r.truth_matched;
  j["truth_total"] = r.truth_total;
  return j.dump(2);
}

double rms_deviation(const RoadGraph& g_in, const RoadGraph& truth, double spacing) {
  const RoadGraph g = reproject(g_in, truth.projection());
  const auto samples = sample_edges(g, spacing);
  if (samples.empty() || truth.edge_count() == 0) return 0.0;
  double sum = 0.0;
  for (const XY& p : samples) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [key, meta] : truth.edges()) {
      best = std::min(best, point_segment_distance(p, truth.position(key.a),
                                                   truth.position(key.b)));
    }
    sum += best * best;
  }
  return std::sqrt(sum / static_cast<double>(samples.size()));
}

}  // namespace roadtrace
