#include <filesystem>
#include <random>
#include <thread>

#include <doctest.h>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "roadtrace/edit_server.hpp"
#include "roadtrace/graph_io.hpp"

using namespace roadtrace;
using namespace roadtrace::edit;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir() {
  std::random_device rd;
  const fs::path p = fs::temp_directory_path() / ("roadtrace_srv_" + std::to_string(rd()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// Base: one 100 m road. Inferred: a road continuing it to the east plus a
// separate loose segment far away.
void write_inputs(const fs::path& dir) {
  const Projection proj(LonLat{8.5, 47.3});
  RoadGraph base(proj);
  base.add_vertex(0, {0, 0});
  base.add_vertex(1, {100, 0});
  base.add_edge(0, 1, {0, Provenance::kBaseMap});
  RoadGraph inferred(proj);
  inferred.add_vertex(10, {100, 2});
  inferred.add_vertex(11, {160, 0});
  inferred.add_vertex(12, {220, 0});
  inferred.add_vertex(13, {220, 40});
  inferred.add_vertex(20, {0, 500});
  inferred.add_vertex(21, {80, 500});
  inferred.add_edge(10, 11, {9, Provenance::kTraced});
  inferred.add_edge(11, 12, {8, Provenance::kTraced});
  inferred.add_edge(12, 13, {4, Provenance::kTraced});
  inferred.add_edge(20, 21, {6, Provenance::kTraced});
  write_graph_file(dir / "base.graph", base);
  write_graph_file(dir / "inferred.graph", inferred);
}

struct Running {
  explicit Running(const fs::path& dir) : store(dir), server(store, ServerOptions{"127.0.0.1", 0, {}}) {
    port = server.bind();
    thread = std::thread([this] { server.listen(); });
    client = std::make_unique<httplib::Client>("127.0.0.1", port);
    // Wait until the accept loop is live.
    for (int i = 0; i < 200 && !client->Get("/healthz"); ++i) {
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
  }
  ~Running() {
    server.stop();
    thread.join();
  }

  json post(const std::string& path, const json& body, int expect = 200) {
    auto res = client->Post(path, body.dump(), "application/json");
    REQUIRE(res);
    CHECK(res->status == expect);
    return json::parse(res->body);
  }
  json get(const std::string& path, int expect = 200) {
    auto res = client->Get(path);
    REQUIRE(res);
    CHECK(res->status == expect);
    return json::parse(res->body);
  }

  SessionStore store;
  EditServer server;
  int port = 0;
  std::thread thread;
  std::unique_ptr<httplib::Client> client;
};

}  // namespace

TEST_CASE("full editing flow over HTTP") {
  const fs::path dir = fresh_dir();
  write_inputs(dir);
  Running r(dir);

  CHECK(r.get("/healthz") == json{{"ok", true}});
  const json created = r.post("/sessions",
                              {{"base_graph_path", (dir / "base.graph").string()},
                               {"inferred_graph_path", "inferred.graph"}},
                              201);
  const std::string id = created.at("session_id");
  const std::string root = "/sessions/" + id;

  const json overlay = r.get(root + "/overlay");
  CHECK(overlay.at("type") == "FeatureCollection");
  REQUIRE(overlay.at("features").size() == 4);
  const json& f0 = overlay.at("features")[0];
  CHECK(f0.at("geometry").at("type") == "LineString");
  CHECK(f0.at("properties").at("status") == "pending");
  CHECK(f0.at("geometry").at("coordinates")[0][0].get<double>() == doctest::Approx(8.5).epsilon(1e-3));

  CHECK(r.get(root + "/base").at("features").size() == 1);

  const json accepted = r.post(root + "/segments/0/status", {{"action", "accept"}});
  CHECK(accepted.at("properties").at("status") == "accepted");
  CHECK(accepted.at("properties").at("segment_id") == 0);
  r.post(root + "/segments/1/status", {{"action", "accept"}});
  r.post(root + "/segments/3/status", {{"action", "reject"}});

  const json pruned = r.post(root + "/prune", json::object());
  CHECK(pruned.at("rejected_ids").is_array());

  const json tp = r.post(root + "/teleport", json::object());
  if (!tp.contains("empty")) {
    CHECK(tp.at("bbox").size() == 4);
    CHECK(tp.at("centroid").size() == 2);
    CHECK(tp.at("size_m").get<double>() > 0);
  }

  auto res = r.client->Get(root + "/export");
  REQUIRE(res);
  CHECK(res->status == 200);
  const RoadGraph exported = read_graph(res->body);
  std::size_t traced = 0, base_edges = 0;
  for (const auto& [k, m] : exported.edges()) {
    traced += m.provenance == Provenance::kTraced;
    base_edges += m.provenance == Provenance::kBaseMap;
  }
  CHECK(base_edges == 1);
  CHECK(traced == 2);

  // Action log on disk matches the session.
  const auto slot = r.store.get(id);
  const std::string log = read_text_file(dir / (id + ".log.jsonl"));
  CHECK(static_cast<std::size_t>(std::count(log.begin(), log.end(), '\n')) ==
        slot->session.action_log().size());
}

TEST_CASE("error statuses") {
  const fs::path dir = fresh_dir();
  write_inputs(dir);
  Running r(dir);

  r.get("/sessions/nope/overlay", 404);
  r.post("/sessions", {{"base_graph_path", "base.graph"}}, 400);
  r.post("/sessions", {{"base_graph_path", "missing.graph"}, {"inferred_graph_path", "inferred.graph"}},
         400);
  auto bad = r.client->Post("/sessions", "{oops", "application/json");
  REQUIRE(bad);
  CHECK(bad->status == 400);

  const std::string id =
      r.post("/sessions", {{"base_graph_path", "base.graph"}, {"inferred_graph_path", "inferred.graph"}},
             201)
          .at("session_id");
  r.post("/sessions/" + id + "/segments/99/status", {{"action", "accept"}}, 404);
  r.post("/sessions/" + id + "/segments/0/status", {{"action", "maybe"}}, 400);
  r.post("/sessions/" + id + "/segments/0/status", {{"action", "teleport"}}, 400);
  r.post("/sessions/" + id + "/prune", {{"keep_importance_min", "many"}}, 400);
}

TEST_CASE("sessions survive a restart") {
  const fs::path dir = fresh_dir();
  write_inputs(dir);
  std::string id;
  json before;
  std::string export_before;
  {
    Running r(dir);
    id = r.post("/sessions",
                {{"base_graph_path", "base.graph"}, {"inferred_graph_path", "inferred.graph"}}, 201)
             .at("session_id");
    r.post("/sessions/" + id + "/segments/2/status", {{"action", "accept"}});
    r.post("/sessions/" + id + "/segments/3/status", {{"action", "reject"}});
    r.post("/sessions/" + id + "/teleport", json::object());
    before = r.get("/sessions/" + id + "/overlay");
    export_before = r.client->Get("/sessions/" + id + "/export")->body;
  }
  Running again(dir);
  CHECK(again.store.load_existing() == 1);
  CHECK(again.get("/sessions/" + id + "/overlay") == before);
  CHECK(again.client->Get("/sessions/" + id + "/export")->body == export_before);
  CHECK(again.store.get(id)->session.teleport_cursor() == 1);

  // New sessions do not reuse the restored id.
  const std::string next =
      again.post("/sessions", {{"base_graph_path", "base.graph"}, {"inferred_graph_path", "inferred.graph"}},
                 201)
          .at("session_id");
  CHECK(next != id);
  fs::remove_all(dir);
}
