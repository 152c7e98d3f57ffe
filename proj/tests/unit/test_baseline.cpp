#include <cmath>
#include <map>
#include <queue>
#include <random>

#include <doctest.h>

#include "oracles.hpp"
#include "roadtrace/baseline.hpp"
#include "roadtrace/error.hpp"
#include "roadtrace/eval.hpp"
#include "roadtrace/synth.hpp"

using namespace roadtrace;

namespace {

using Cell = std::pair<std::int64_t, std::int64_t>;

// Brute-force counts keyed by global cell: union of cells per trajectory.
std::map<Cell, int> oracle_counts(const std::vector<Trajectory>& trajs, double s) {
  std::map<Cell, int> out;
  for (const auto& t : trajs) {
    std::set<Cell> cells;
    if (t.points.size() == 1) {
      const XY p = t.points[0].pos;
      cells.insert({static_cast<std::int64_t>(std::floor(p.x / s)),
                    static_cast<std::int64_t>(std::floor(p.y / s))});
    }
    for (std::size_t i = 1; i < t.points.size(); ++i) {
      for (const Cell& c : oracle::segment_cells(t.points[i - 1].pos, t.points[i].pos, s)) {
        cells.insert(c);
      }
    }
    for (const Cell& c : cells) ++out[c];
  }
  return out;
}

std::map<Cell, int> grid_counts(const DensityGrid& g) {
  std::map<Cell, int> out;
  for (int r = 0; r < g.height; ++r) {
    for (int c = 0; c < g.width; ++c) {
      if (g.at(c, r) == 0) continue;
      const XY m = g.cell_center(c, r);
      out[{static_cast<std::int64_t>(std::floor(m.x / g.cell_size)),
           static_cast<std::int64_t>(std::floor(m.y / g.cell_size))}] = g.at(c, r);
    }
  }
  return out;
}

// 8-connected components of set cells.
int mask_components(const std::vector<std::uint8_t>& m, int w, int h) {
  std::vector<int> seen(m.size(), 0);
  int n = 0;
  for (int i = 0; i < w * h; ++i) {
    if (!m[static_cast<std::size_t>(i)] || seen[static_cast<std::size_t>(i)]) continue;
    ++n;
    std::queue<int> q;
    q.push(i);
    seen[static_cast<std::size_t>(i)] = 1;
    while (!q.empty()) {
      const int cur = q.front();
      q.pop();
      const int cx = cur % w, cy = cur / w;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int x = cx + dx, y = cy + dy;
          if (x < 0 || y < 0 || x >= w || y >= h) continue;
          const auto k = static_cast<std::size_t>(y * w + x);
          if (m[k] && !seen[k]) {
            seen[k] = 1;
            q.push(y * w + x);
          }
        }
      }
    }
  }
  return n;
}

double total_length(const RoadGraph& g) {
  double s = 0;
  for (const auto& [k, m] : g.edges()) s += g.edge_length(k);
  return s;
}

std::vector<Trajectory> synth_trips(const synth::GraphKind& kind, int n, std::uint64_t seed = 1) {
  synth::SynthConfig c;
  c.graph_kind = kind;
  c.n_trips = n;
  c.rng_seed = seed;
  return synth::simulate_trips(synth::make_ground_truth(kind), c);
}

}  // namespace

TEST_CASE("density grid examples") {
  CHECK_THROWS_AS(density_grid({}, 0), ConfigError);
  CHECK_THROWS_AS(density_grid({}, -1), ConfigError);
  const DensityGrid empty = density_grid({}, 5);
  for (int c : empty.counts) CHECK(c == 0);

  // Five cells along a horizontal line, through cell interiors.
  Trajectory t{"a", {{0, {1, 2.5}}, {1, {24, 2.5}}}};
  const DensityGrid g = density_grid({t}, 5);
  const auto counts = grid_counts(g);
  CHECK(counts.size() == 5);
  for (int x = 0; x < 5; ++x) CHECK(counts.at({x, 0}) == 1);

  // An exact corner pass also takes the +x side cell so the run stays
  // 4-connected.
  const auto diag = traverse_cells({1, 1}, {9, 9}, 5);
  CHECK(diag == std::vector<Cell>{{0, 0}, {1, 0}, {1, 1}});
}

TEST_CASE("density grid matches the brute-force cell enumeration") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> cs(2, 12);
  for (int trial = 0; trial < 100; ++trial) {
    const auto trajs = oracle::random_trajectories(rng, 15, 150);
    const double s = cs(rng);
    REQUIRE(grid_counts(density_grid(trajs, s)) == oracle_counts(trajs, s));
  }
}

TEST_CASE("property: duplicating trajectories doubles every count") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const auto trajs = oracle::random_trajectories(rng, 10, 100);
    auto twice = trajs;
    twice.insert(twice.end(), trajs.begin(), trajs.end());
    const DensityGrid a = density_grid(trajs, 5), b = density_grid(twice, 5);
    REQUIRE(a.width == b.width);
    REQUIRE(a.height == b.height);
    for (std::size_t i = 0; i < a.counts.size(); ++i) REQUIRE(b.counts[i] == 2 * a.counts[i]);
  }
}

TEST_CASE("a stationary vehicle counts once") {
  Trajectory t{"s", {}};
  for (int i = 0; i < 50; ++i) t.points.push_back({static_cast<double>(i), {2.0 + i * 1e-3, 2.0}});
  const DensityGrid g = density_grid({t}, 5);
  const auto counts = grid_counts(g);
  REQUIRE(counts.size() == 1);
  CHECK(counts.begin()->second == 1);
}

TEST_CASE("property: threshold monotonicity") {
  const auto trips = synth_trips(synth::Grid{2, 100}, 120);
  const DensityGrid g = density_grid(trips, 5);
  double prev_len = std::numeric_limits<double>::infinity();
  std::vector<std::uint8_t> prev_mask;
  for (int th = 1; th <= 12; ++th) {
    std::vector<std::uint8_t> mask(g.counts.size());
    for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = g.counts[i] >= th;
    if (!prev_mask.empty()) {
      for (std::size_t i = 0; i < mask.size(); ++i) CHECK(mask[i] <= prev_mask[i]);
    }
    prev_mask = mask;
    // Thinning erodes the ends of wide bands more than narrow ones, so the
    // skeleton can grow slightly as the mask shrinks. Allow 2% per step.
    const double len = total_length(extract_graph(g, th));
    CHECK(len <= prev_len * 1.02);
    prev_len = len;
  }
  CHECK(total_length(extract_graph(g, 12)) < total_length(extract_graph(g, 1)));
}

TEST_CASE("property: thinning keeps connectivity and stays in the mask") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const int w = 20 + static_cast<int>(rng() % 20), h = 20 + static_cast<int>(rng() % 20);
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(w * h), 0);
    // A few thick random strokes.
    for (int s = 0; s < 4; ++s) {
      int x = static_cast<int>(rng() % w), y = static_cast<int>(rng() % h);
      const int dx = static_cast<int>(rng() % 3) - 1, dy = static_cast<int>(rng() % 3) - 1;
      const int thick = 1 + static_cast<int>(rng() % 3);
      for (int k = 0; k < 25; ++k) {
        for (int a = -thick; a <= thick; ++a) {
          for (int b = -thick; b <= thick; ++b) {
            const int px = x + a, py = y + b;
            if (px >= 0 && py >= 0 && px < w && py < h) mask[static_cast<std::size_t>(py * w + px)] = 1;
          }
        }
        x += dx;
        y += dy;
      }
    }
    const auto skel = zhang_suen_thin(mask, w, h);
    for (std::size_t i = 0; i < mask.size(); ++i) REQUIRE(skel[i] <= mask[i]);
    // Every mask component keeps at least one skeleton cell and no component
    // splits.
    CHECK(mask_components(skel, w, h) == mask_components(mask, w, h));
  }
}

TEST_CASE("extract_graph examples") {
  const DensityGrid zero = density_grid({}, 5);
  CHECK(extract_graph(zero, 1).empty());

  const synth::Straight kind{500};
  const auto truth = synth::make_ground_truth(kind);
  const auto trips = synth_trips(kind, 50);
  const RoadGraph g = extract_graph(density_grid(trips, 5), 1, truth.projection());
  CHECK(connected_components(g).size() == 1);
  for (const auto& [k, m] : g.edges()) CHECK(m.provenance == Provenance::kBaseline);
  const auto e = geo_precision_recall(g, truth);
  CHECK(e.precision >= 0.9);
  CHECK(e.recall >= 0.9);
}

TEST_CASE("the baseline connects two roads that only cross") {
  const synth::TwoCrossingNoConnection kind{};
  const auto truth = synth::make_ground_truth(kind);
  const auto trips = synth_trips(kind, 200);
  const RoadGraph g = extract_graph(density_grid(trips, 5), 1, truth.projection());
  std::vector<VertexId> horiz, vert;
  for (const auto& [id, p] : g.vertices()) {
    if (std::abs(p.y) < 15 && std::abs(p.x) > 40) horiz.push_back(id);
    if (std::abs(p.x) < 15 && std::abs(p.y) > 40) vert.push_back(id);
  }
  REQUIRE_FALSE(horiz.empty());
  REQUIRE_FALSE(vert.empty());
  CHECK(any_path_between(g, horiz, vert));
}
