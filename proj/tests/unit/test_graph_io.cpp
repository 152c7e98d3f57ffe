#include <random>
#include <string>

#include <doctest.h>
#include <nlohmann/json.hpp>

#include "roadtrace/error.hpp"
#include "roadtrace/graph_io.hpp"

using namespace roadtrace;

namespace {

RoadGraph random_graph(std::mt19937_64& rng, int n) {
  RoadGraph g(Projection(LonLat{-122.4, 37.7}));
  std::uniform_real_distribution<double> c(-5000, 5000);
  std::uniform_int_distribution<int> sup(0, 500), prov(0, 3);
  for (int i = 0; i < n; ++i) g.add_vertex(i * 3 + 1, {c(rng), c(rng)});
  std::uniform_int_distribution<int> pick(0, n - 1);
  for (int k = 0; k < 2 * n; ++k) {
    const int a = pick(rng) * 3 + 1, b = pick(rng) * 3 + 1;
    if (a != b) g.add_edge(a, b, {sup(rng), static_cast<Provenance>(prov(rng))});
  }
  return g;
}

}  // namespace

TEST_CASE("empty and minimal files") {
  CHECK(read_graph("# just a comment\n\n").empty());
  const RoadGraph g = read_graph("v 1 0.0 0.0\nv 2 0.001 0.0\ne 1 2 7\n");
  CHECK(g.vertex_count() == 2);
  CHECK(g.edge_count() == 1);
  CHECK(g.edge_meta(1, 2).support == 7);
  CHECK(g.edge_meta(1, 2).provenance == Provenance::kBaseMap);
  CHECK(g.edge_length(EdgeKey(1, 2)) == doctest::Approx(111.19).epsilon(1e-3));
}

TEST_CASE("parse errors carry line numbers") {
  auto line_of = [](const std::string& text) {
    try {
      read_graph(text);
    } catch (const ParseError& e) {
      return static_cast<long>(e.line());
    }
    return -1L;
  };
  CHECK(line_of("v 1 0 0\ne 1 5\n") == 2);
  CHECK(line_of("v 1 0 0\nv 1 1 1\n") == 2);
  CHECK(line_of("v 1 0 0\nv 2 0 0\ne 1 2\nv 3 0 0\n") == 4);
  CHECK(line_of("# c\nv 1 0 zero\n") == 2);
  CHECK(line_of("v 1 0 0\ne 1 1\n") == 2);
  CHECK(line_of("v 1 0 0\nv 2 1 1\ne 1 2\ne 2 1\n") == 4);
  CHECK(line_of("x 1\n") == 1);
  CHECK(line_of("v 1 200 0\n") == 1);
  CHECK(line_of("v 1 0 0\nv 2 1 1\ne 1 2 3 paved\n") == 3);
  try {
    read_graph("v 1 0 0\ne 1 42\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("42") != std::string::npos);
  }
}

TEST_CASE("read after write is the identity on graphs") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const RoadGraph g = random_graph(rng, 30);
    const RoadGraph r = read_graph(write_graph(g));
    REQUIRE(r.vertex_count() == g.vertex_count());
    CHECK(r.edges() == g.edges());
    CHECK(r.projection() == g.projection());
    for (const auto& [id, p] : g.vertices()) {
      // 7 decimals of a degree is about 1.1 cm.
      CHECK(distance(p, r.position(id)) < 0.02);
    }
  }
}

TEST_CASE("write after read is the identity on canonical files") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const std::string text = write_graph(random_graph(rng, 20));
    CHECK(write_graph(read_graph(text)) == text);
  }
}

TEST_CASE("without an origin line the projection is centered on the vertices") {
  const RoadGraph g = read_graph("v 1 10.0 50.0\nv 2 10.002 50.002\n");
  CHECK(g.projection().origin().lon == doctest::Approx(10.001));
  CHECK(g.projection().origin().lat == doctest::Approx(50.001));
  const Projection forced(LonLat{10, 50});
  CHECK(read_graph("# origin 1 1\nv 1 10.0 50.0\n", forced).position(1).x ==
        doctest::Approx(0).epsilon(1e-9));
}

TEST_CASE("geojson export") {
  const RoadGraph g = read_graph("v 1 0 0\nv 2 0.001 0\ne 1 2 4 traced\n");
  const auto j = nlohmann::json::parse(graph_to_geojson(g));
  CHECK(j["type"] == "FeatureCollection");
  REQUIRE(j["features"].size() == 1);
  const auto& f = j["features"][0];
  CHECK(f["geometry"]["type"] == "LineString");
  CHECK(f["properties"]["support"] == 4);
  CHECK(f["properties"]["provenance"] == "traced");
  CHECK(f["properties"]["ids"] == nlohmann::json::array({1, 2}));
  CHECK(f["geometry"]["coordinates"][1][0].get<double>() == doctest::Approx(0.001));
}

TEST_CASE("missing files raise IoError naming the path") {
  try {
    read_graph_file("/nonexistent/dir/g.graph");
    FAIL("expected IoError");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("/nonexistent/dir/g.graph") != std::string::npos);
  }
}

TEST_CASE("format_fixed never prints negative zero") {
  CHECK(format_fixed(-0.0) == "0.0000000");
  CHECK(format_fixed(-1e-12) == "0.0000000");
  CHECK(format_fixed(-1.5) == "-1.5000000");
}
