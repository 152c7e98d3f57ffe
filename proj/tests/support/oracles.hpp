#pragma once

// Brute-force reference implementations used by the tests. They share no
// code with the library beyond its plain data types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "roadtrace/graph.hpp"
#include "roadtrace/trajectory.hpp"

namespace oracle {

using roadtrace::RoadGraph;
using roadtrace::Trajectory;
using roadtrace::TrajPoint;
using roadtrace::VertexId;
using roadtrace::XY;

inline double dist(XY a, XY b) { return std::hypot(a.x - b.x, a.y - b.y); }

// Closest point on segment ab by clamped projection.
inline double seg_dist(XY p, XY a, XY b) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

// Degrees, 0 = east, counterclockwise, in [0, 360).
inline double angle_of(XY v) {
  double d = std::atan2(v.y, v.x) * 180.0 / 3.14159265358979323846;
  if (d < 0) d += 360.0;
  if (d >= 360.0) d -= 360.0;
  return d;
}

struct Crossing {
  std::size_t traj;
  std::size_t enter;
  bool forward;
  friend auto operator<=>(const Crossing&, const Crossing&) = default;
};

// Maximal runs of points within r of c, both orientations, by direct scan.
inline std::vector<Crossing> crossings(const std::vector<Trajectory>& trajs, XY c, double r) {
  std::vector<Crossing> out;
  for (std::size_t t = 0; t < trajs.size(); ++t) {
    const auto& pts = trajs[t].points;
    std::size_t i = 0;
    while (i < pts.size()) {
      if (dist(pts[i].pos, c) > r) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j + 1 < pts.size() && dist(pts[j + 1].pos, c) <= r) ++j;
      out.push_back({t, i, true});
      out.push_back({t, j, false});
      i = j + 1;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Exit point of the walk from index i in direction step until the first point
// outside radius R, solved on the circle by the quadratic formula.
inline bool exit_point(const std::vector<TrajPoint>& pts, std::size_t i, int step, XY c,
                       double R, XY& out) {
  long k = static_cast<long>(i);
  while (true) {
    const long n = k + step;
    if (n < 0 || n >= static_cast<long>(pts.size())) return false;
    const XY a = pts[static_cast<std::size_t>(k)].pos;
    const XY b = pts[static_cast<std::size_t>(n)].pos;
    if (dist(b, c) > R) {
      const double dx = b.x - a.x, dy = b.y - a.y;
      const double fx = a.x - c.x, fy = a.y - c.y;
      const double A = dx * dx + dy * dy;
      const double B = 2 * (fx * dx + fy * dy);
      const double C = fx * fx + fy * fy - R * R;
      const double t = (-B + std::sqrt(std::max(0.0, B * B - 4 * A * C))) / (2 * A);
      out = {a.x + t * dx, a.y + t * dy};
      return true;
    }
    k = n;
  }
}

// Unconditioned raw exit counts per bin.
inline std::vector<int> raw_histogram(const std::vector<Trajectory>& trajs, XY c, double r_match,
                                      double r_hist, int n_bins) {
  std::vector<int> h(static_cast<std::size_t>(n_bins), 0);
  for (const auto& x : crossings(trajs, c, r_match)) {
    XY e;
    if (!exit_point(trajs[x.traj].points, x.enter, x.forward ? 1 : -1, c, r_hist, e)) continue;
    const double w = 360.0 / n_bins;
    int bin = static_cast<int>(std::floor(angle_of({e.x - c.x, e.y - c.y}) / w)) % n_bins;
    ++h[static_cast<std::size_t>(bin)];
  }
  return h;
}

// Cells (floor(x/s), floor(y/s)) met by segment ab: every cell in the
// bounding box tested by Liang-Barsky clipping against the closed square.
inline std::set<std::pair<std::int64_t, std::int64_t>> segment_cells(XY a, XY b, double s) {
  std::set<std::pair<std::int64_t, std::int64_t>> out;
  const auto lo_x = static_cast<std::int64_t>(std::floor(std::min(a.x, b.x) / s));
  const auto hi_x = static_cast<std::int64_t>(std::floor(std::max(a.x, b.x) / s));
  const auto lo_y = static_cast<std::int64_t>(std::floor(std::min(a.y, b.y) / s));
  const auto hi_y = static_cast<std::int64_t>(std::floor(std::max(a.y, b.y) / s));
  for (auto cx = lo_x; cx <= hi_x; ++cx) {
    for (auto cy = lo_y; cy <= hi_y; ++cy) {
      const double x0 = cx * s, x1 = (cx + 1) * s, y0 = cy * s, y1 = (cy + 1) * s;
      double t0 = 0, t1 = 1;
      const double dx = b.x - a.x, dy = b.y - a.y;
      const double p[4] = {-dx, dx, -dy, dy};
      const double q[4] = {a.x - x0, x1 - a.x, a.y - y0, y1 - a.y};
      bool hit = true;
      for (int k = 0; k < 4 && hit; ++k) {
        if (p[k] == 0) {
          if (q[k] < 0) hit = false;
        } else {
          const double t = q[k] / p[k];
          if (p[k] < 0) t0 = std::max(t0, t);
          else t1 = std::min(t1, t);
          if (t0 > t1) hit = false;
        }
      }
      // Only count cells whose interior the segment reaches, or that contain
      // an endpoint; grazing a shared border does not count.
      if (hit) {
        const double tm = 0.5 * (t0 + t1);
        const XY m{a.x + tm * dx, a.y + tm * dy};
        const bool inside = m.x >= x0 && m.x < x1 && m.y >= y0 && m.y < y1;
        if (inside) out.insert({cx, cy});
      }
    }
  }
  return out;
}

// Evenly spaced samples, recomputed from scratch; vertices once.
inline std::vector<XY> samples(const RoadGraph& g, double spacing) {
  std::vector<XY> out;
  for (const auto& [id, p] : g.vertices()) {
    if (!g.neighbors(id).empty()) out.push_back(p);
  }
  for (const auto& [k, m] : g.edges()) {
    const XY a = g.position(k.a), b = g.position(k.b);
    const double len = dist(a, b);
    long n = static_cast<long>(std::ceil(len / spacing - 1e-9));
    if (n < 1) n = 1;
    for (long i = 1; i < n; ++i) {
      const double t = static_cast<double>(i) / n;
      out.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
    }
  }
  return out;
}

inline bool near_graph(XY p, const RoadGraph& g, double d) {
  for (const auto& [k, m] : g.edges()) {
    if (seg_dist(p, g.position(k.a), g.position(k.b)) <= d) return true;
  }
  return false;
}

// Share of a's samples within d of b; nan when a has no samples.
inline double matched_share(const RoadGraph& a, const RoadGraph& b, double spacing, double d) {
  const auto s = samples(a, spacing);
  if (s.empty()) return std::nan("");
  std::size_t n = 0;
  for (const XY& p : s) n += near_graph(p, b, d);
  return static_cast<double>(n) / static_cast<double>(s.size());
}

// Random trajectories: bounded random walks with occasional sharp turns.
inline std::vector<Trajectory> random_trajectories(std::mt19937_64& rng, int n, double extent,
                                                   int max_points = 40) {
  std::uniform_real_distribution<double> pos(-extent, extent);
  std::uniform_real_distribution<double> ang(0, 2 * 3.14159265358979323846);
  std::uniform_real_distribution<double> stepd(2, 15);
  std::uniform_int_distribution<int> len(2, max_points);
  std::vector<Trajectory> out;
  for (int t = 0; t < n; ++t) {
    Trajectory tr;
    tr.id = "r" + std::to_string(t);
    XY p{pos(rng), pos(rng)};
    double heading = ang(rng);
    const int m = len(rng);
    for (int i = 0; i < m; ++i) {
      tr.points.push_back({1000.0 + i, p});
      if (rng() % 5 == 0) heading = ang(rng);
      const double s = stepd(rng);
      p = {p.x + s * std::cos(heading), p.y + s * std::sin(heading)};
    }
    out.push_back(std::move(tr));
  }
  return out;
}

// Trajectories that pass near the origin from random directions, half of
// them turning once on the way.
inline std::vector<Trajectory> trajectories_near_origin(std::mt19937_64& rng, int n) {
  constexpr double kPi = 3.14159265358979323846;
  std::uniform_real_distribution<double> off(-15, 15), ang(0, 360), len(4, 12);
  std::vector<Trajectory> out;
  for (int i = 0; i < n; ++i) {
    const double a = ang(rng) * kPi / 180.0;
    XY p{off(rng) - 60 * std::cos(a), off(rng) - 60 * std::sin(a)};
    double heading = a;
    Trajectory t{"t" + std::to_string(i), {}};
    for (int k = 0; k < 30; ++k) {
      t.points.push_back({static_cast<double>(k), p});
      if (k == 12 && rng() % 2) heading += (ang(rng) - 180) * kPi / 360.0;
      const double s = len(rng);
      p = {p.x + s * std::cos(heading), p.y + s * std::sin(heading)};
    }
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace oracle
