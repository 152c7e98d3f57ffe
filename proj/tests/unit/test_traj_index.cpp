#include <random>

#include <doctest.h>

#include "oracles.hpp"
#include "roadtrace/error.hpp"
#include "roadtrace/traj_index.hpp"

using namespace roadtrace;

namespace {

std::vector<oracle::Crossing> as_oracle(const std::vector<Crossing>& cs) {
  std::vector<oracle::Crossing> out;
  for (const auto& c : cs) {
    out.push_back({c.traj, c.enter_index, c.orientation == Orientation::kForward});
  }
  std::sort(out.begin(), out.end());
  return out;
}

Trajectory polyline(std::initializer_list<XY> pts) {
  Trajectory t{"p", {}};
  double time = 0;
  for (XY p : pts) t.points.push_back({time++, p});
  return t;
}

}  // namespace

TEST_CASE("index construction") {
  CHECK_THROWS_AS(build_index({}, 0.0), ConfigError);
  CHECK_THROWS_AS(build_index({}, -1.0), ConfigError);
  CHECK(build_index({}, 10.0).buckets().empty());

  const TrajIndex idx = build_index({polyline({{1, 1}, {29, 1}})}, 10.0);
  CHECK(idx.buckets().size() >= 3);
  for (int cx = 0; cx < 3; ++cx) CHECK(idx.buckets().count(CellKey{cx, 0}) == 1);
}

TEST_CASE("crossing examples") {
  const TrajIndex straight = build_index({polyline({{-50, 0}, {-5, 0}, {5, 0}, {50, 0}})}, 30);
  CHECK(query_crossings(straight, {0, 100}, 12).empty());
  const auto two = query_crossings(straight, {0, 0}, 12);
  REQUIRE(two.size() == 2);
  CHECK(two[0].orientation == Orientation::kForward);
  CHECK(two[0].enter_index == 1);
  CHECK(two[1].orientation == Orientation::kReverse);
  CHECK(two[1].enter_index == 2);

  // Passes through the disc, leaves, and comes back.
  const TrajIndex loop = build_index(
      {polyline({{-50, 0}, {0, 0}, {50, 0}, {50, 50}, {0, 50}, {0, 1}, {0, -50}})}, 30);
  const auto four = query_crossings(loop, {0, 0}, 12);
  CHECK(four.size() == 4);
  CHECK(as_oracle(four) == oracle::crossings(loop.trajectories(), {0, 0}, 12));
}

TEST_CASE("candidates cover every segment that meets the disc") {
  std::mt19937_64 rng(17);
  const auto trajs = oracle::random_trajectories(rng, 100, 400);
  const TrajIndex idx = build_index(trajs, 30);
  std::uniform_real_distribution<double> c(-450, 450), r(1, 60);
  for (int q = 0; q < 50; ++q) {
    const XY center{c(rng), c(rng)};
    const double radius = r(rng);
    const auto cand = idx.candidates(center, radius);
    for (std::size_t t = 0; t < trajs.size(); ++t) {
      const auto& pts = trajs[t].points;
      for (std::size_t s = 0; s + 1 < pts.size(); ++s) {
        if (oracle::seg_dist(center, pts[s].pos, pts[s + 1].pos) <= radius) {
          CHECK(std::binary_search(cand.begin(), cand.end(), SegmentRef{t, s}));
        }
      }
    }
  }
}

TEST_CASE("query_crossings equals a brute-force scan on 1000 random queries") {
  std::mt19937_64 rng(23);
  const auto trajs = oracle::random_trajectories(rng, 150, 300);
  const TrajIndex idx = build_index(trajs, 30);
  std::uniform_real_distribution<double> c(-350, 350), r(0.5, 40);
  for (int q = 0; q < 1000; ++q) {
    const XY center{c(rng), c(rng)};
    const double radius = r(rng);
    REQUIRE(as_oracle(query_crossings(idx, center, radius)) ==
            oracle::crossings(trajs, center, radius));
  }
}

TEST_CASE("crossings are translation invariant") {
  std::mt19937_64 rng(29);
  auto trajs = oracle::random_trajectories(rng, 60, 200);
  auto moved = trajs;
  const XY d{1234.5, -987.25};
  for (auto& t : moved) {
    for (auto& p : t.points) p.pos = p.pos + d;
  }
  const TrajIndex a = build_index(trajs, 30), b = build_index(moved, 30);
  std::uniform_real_distribution<double> c(-200, 200);
  for (int q = 0; q < 200; ++q) {
    const XY center{c(rng), c(rng)};
    CHECK(query_crossings(a, center, 12) == query_crossings(b, center + d, 12));
  }
}
