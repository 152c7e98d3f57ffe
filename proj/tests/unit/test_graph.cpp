#include <random>

#include <doctest.h>

#include "roadtrace/error.hpp"
#include "roadtrace/graph.hpp"

using namespace roadtrace;

namespace {

RoadGraph square(double side) {
  RoadGraph g;
  g.add_vertex(0, {0, 0});
  g.add_vertex(1, {side, 0});
  g.add_vertex(2, {side, side});
  g.add_vertex(3, {0, side});
  for (int i = 0; i < 4; ++i) g.add_edge(i, (i + 1) % 4);
  return g;
}

}  // namespace

TEST_CASE("graph invariants are enforced") {
  RoadGraph g;
  g.add_vertex(1, {0, 0});
  g.add_vertex(2, {10, 0});
  CHECK_THROWS_AS(g.add_vertex(1, {5, 5}), IntegrityError);
  CHECK_THROWS_AS(g.add_vertex(9, {NAN, 0}), IntegrityError);
  CHECK_THROWS_AS(g.add_edge(1, 1), IntegrityError);
  CHECK_THROWS_AS(g.add_edge(1, 7), IntegrityError);
  CHECK(g.add_edge(2, 1));
  CHECK_FALSE(g.add_edge(1, 2));
  CHECK(g.edge_count() == 1);
  CHECK(g.has_edge(1, 2));
  CHECK(g.has_edge(2, 1));
  CHECK(g.add_vertex(XY{3, 3}) == 3);
  g.remove_vertex(1);
  CHECK(g.edge_count() == 0);
  CHECK(g.degree(2) == 0);
  CHECK_THROWS(g.position(1));
}

TEST_CASE("edge keys are unordered") {
  CHECK(EdgeKey(5, 2) == EdgeKey(2, 5));
  CHECK(EdgeKey(5, 2).a == 2);
  CHECK(EdgeKey(5, 2).other(5) == 2);
}

TEST_CASE("lengths, components and cycles") {
  RoadGraph g = square(100);
  CHECK(g.total_length() == doctest::Approx(400));
  CHECK(has_cycle(g));
  g.remove_edge(3, 0);
  CHECK_FALSE(has_cycle(g));
  g.add_vertex(10, {500, 500});
  g.add_vertex(11, {600, 500});
  g.add_edge(10, 11);
  const auto comps = connected_components(g);
  REQUIRE(comps.size() == 2);
  CHECK(comps[0] == std::vector<VertexId>{0, 1, 2, 3});
  CHECK(path_exists(g, 0, 3));
  CHECK_FALSE(path_exists(g, 0, 10));
  CHECK(any_path_between(g, {0, 10}, {11}));
  CHECK_FALSE(any_path_between(g, {0, 1}, {10, 11}));
}

TEST_CASE("dijkstra follows lengths") {
  // Two routes 0 -> 3: via 1 (length 20) and via 2 (length ~28.3).
  RoadGraph g;
  g.add_vertex(0, {0, 0});
  g.add_vertex(1, {10, 0});
  g.add_vertex(2, {10, 10});
  g.add_vertex(3, {20, 0});
  g.add_edge(0, 1);
  g.add_edge(1, 3);
  g.add_edge(0, 2);
  g.add_edge(2, 3);
  const auto t = dijkstra(g, 0);
  CHECK(t.dist.at(3) == doctest::Approx(20));
  CHECK(path_to(t, 3) == std::vector<VertexId>{0, 1, 3});
  g.add_vertex(9, {100, 100});
  CHECK(path_to(dijkstra(g, 0), 9).empty());
}

TEST_CASE("nearest vertex is inclusive and breaks ties by id") {
  RoadGraph g;
  g.add_vertex(4, {10, 0});
  g.add_vertex(2, {-10, 0});
  CHECK(nearest_vertex(g, {0, 0}, 10) == VertexId{2});
  CHECK_FALSE(nearest_vertex(g, {0, 0}, 9.999).has_value());
  CHECK(nearest_vertex(g, {9, 0}, 10) == VertexId{4});
}

TEST_CASE("reproject preserves geometry") {
  RoadGraph g(Projection(LonLat{10, 50}));
  g.add_vertex(0, {0, 0});
  g.add_vertex(1, {300, 400});
  g.add_edge(0, 1);
  const RoadGraph r = reproject(g, Projection(LonLat{10.001, 50.001}));
  CHECK(r.edge_length(EdgeKey(0, 1)) == doctest::Approx(500).epsilon(1e-5));
  const RoadGraph back = reproject(r, g.projection());
  CHECK(distance(back.position(1), g.position(1)) < 1e-6);
}
