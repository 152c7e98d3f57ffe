#include "roadtrace/edit_server.hpp"

#include <fstream>
#include <iostream>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "roadtrace/error.hpp"
#include "roadtrace/graph_io.hpp"

namespace roadtrace::edit {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

ordered_json lonlat_json(const Projection& proj, XY p) {
  const LonLat ll = proj.unproject(p);
  return ordered_json::array({ll.lon, ll.lat});
}

ordered_json feature(const Session& s, const OverlaySegment& seg) {
  const RoadGraph& g = s.inferred();
  ordered_json f;
  f["type"] = "Feature";
  f["geometry"] = {{"type", "LineString"},
                   {"coordinates",
                    ordered_json::array({lonlat_json(g.projection(), g.position(seg.edge.a)),
                                         lonlat_json(g.projection(), g.position(seg.edge.b))})}};
  f["properties"] = {{"segment_id", seg.id},
                     {"status", std::string(to_string(seg.status))},
                     {"support", seg.support}};
  return f;
}

std::string session_file(const fs::path& dir, const std::string& id) {
  return (dir / (id + ".session.json")).string();
}

std::string log_file(const fs::path& dir, const std::string& id) {
  return (dir / (id + ".log.jsonl")).string();
}

}  // namespace

std::string overlay_geojson(const Session& s) {
  ordered_json fc;
  fc["type"] = "FeatureCollection";
  fc["features"] = ordered_json::array();
  for (const auto& seg : s.overlay()) fc["features"].push_back(feature(s, seg));
  return fc.dump();
}

std::string segment_feature_json(const Session& s, SegmentId id) {
  return feature(s, s.segment(id)).dump();
}

SessionStore::SessionStore(fs::path data_dir, SessionConfig cfg)
    : dir_(std::move(data_dir)), cfg_(cfg) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw IoError("cannot create data directory " + dir_.string() + ": " + ec.message());
}

fs::path SessionStore::resolve(const std::string& p) const {
  const fs::path path(p);
  return path.is_absolute() ? path : dir_ / path;
}

std::shared_ptr<SessionSlot> SessionStore::open(const std::string& id,
                                                const std::string& base_path,
                                                const std::string& inferred_path) {
  RoadGraph base = read_graph_file(resolve(base_path));
  RoadGraph inferred = read_graph_file(resolve(inferred_path), base.projection());
  auto slot = std::make_shared<SessionSlot>(
      create_session(id, std::move(base), std::move(inferred), cfg_));
  return slot;
}

std::string SessionStore::create(const std::string& base_path,
                                 const std::string& inferred_path) {
  std::string id;
  {
    std::lock_guard lock(mutex_);
    id = "s" + std::to_string(next_id_++);
  }
  auto slot = open(id, base_path, inferred_path);

  ordered_json meta;
  meta["id"] = id;
  meta["base_graph_path"] = base_path;
  meta["inferred_graph_path"] = inferred_path;
  write_text_file(session_file(dir_, id), meta.dump(2) + "\n");
  write_text_file(log_file(dir_, id), "");

  const std::string log_path = log_file(dir_, id);
  slot->session.set_log_sink([log_path](const LogEntry& e) {
    std::ofstream out(log_path, std::ios::app);
    out << to_json_line(e) << '\n';
    out.flush();
    if (!out) throw IoError("cannot append to " + log_path);
  });

  std::lock_guard lock(mutex_);
  sessions_[id] = slot;
  return id;
}

std::size_t SessionStore::load_existing() {
  std::vector<fs::path> found;
  for (const auto& entry : fs::directory_iterator(dir_)) {
    const std::string name = entry.path().filename().string();
    const std::string suffix = ".session.json";
    if (name.size() > suffix.size() &&
        name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
      found.push_back(entry.path());
    }
  }
  std::sort(found.begin(), found.end());

  std::size_t restored = 0;
  for (const fs::path& p : found) {
    const json meta = json::parse(read_text_file(p), nullptr, false);
    if (meta.is_discarded()) throw ParseError(0, "malformed session file " + p.string());
    const std::string id = meta.at("id").get<std::string>();
    {
      std::lock_guard lock(mutex_);
      if (sessions_.count(id)) continue;
    }
    auto slot = open(id, meta.at("base_graph_path").get<std::string>(),
                     meta.at("inferred_graph_path").get<std::string>());

    std::vector<LogEntry> entries;
    const std::string log_path = log_file(dir_, id);
    if (fs::exists(log_path)) {
      std::istringstream in(read_text_file(log_path));
      std::string line;
      while (std::getline(in, line)) {
        if (!line.empty()) entries.push_back(parse_log_line(line));
      }
    }
    slot->session.replay(entries);
    slot->session.set_log_sink([log_path](const LogEntry& e) {
      std::ofstream out(log_path, std::ios::app);
      out << to_json_line(e) << '\n';
      if (!out) throw IoError("cannot append to " + log_path);
    });

    std::lock_guard lock(mutex_);
    sessions_[id] = slot;
    if (id.size() > 1 && id[0] == 's') {
      try {
        next_id_ = std::max(next_id_, std::stoll(id.substr(1)) + 1);
      } catch (const std::exception&) {
      }
    }
    ++restored;
  }
  return restored;
}

std::shared_ptr<SessionSlot> SessionStore::get(const std::string& id) const {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw NotFound("unknown session " + id);
  return it->second;
}

struct EditServer::Impl {
  SessionStore& store;
  ServerOptions opts;
  httplib::Server http;
  int port = -1;

  Impl(SessionStore& s, ServerOptions o) : store(s), opts(std::move(o)) {}

  static void send_json(httplib::Response& res, const std::string& body, int status = 200) {
    res.status = status;
    res.set_content(body, "application/json");
  }

  static void send_error(httplib::Response& res, int status, const std::string& msg) {
    send_json(res, ordered_json{{"error", msg}}.dump(), status);
  }

  // Parses the body as a JSON object; an empty body counts as {}.
  static json body_object(const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    json j = json::parse(req.body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw ConfigError("request body must be a JSON object");
    return j;
  }

  template <typename F>
  static httplib::Server::Handler guarded(F f) {
    return [f](const httplib::Request& req, httplib::Response& res) {
      try {
        f(req, res);
      } catch (const NotFound& e) {
        send_error(res, 404, e.what());
      } catch (const ConfigError& e) {
        send_error(res, 400, e.what());
      } catch (const ParseError& e) {
        send_error(res, 400, e.what());
      } catch (const IoError& e) {
        send_error(res, 400, e.what());
      } catch (const json::exception& e) {
        send_error(res, 400, e.what());
      } catch (const std::exception& e) {
        send_error(res, 500, e.what());
      }
    };
  }

  void routes() {
    http.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
      send_json(res, R"({"ok":true})");
    });

    http.Post("/sessions", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const json body = body_object(req);
      if (!body.contains("base_graph_path") || !body.contains("inferred_graph_path")) {
        throw ConfigError("base_graph_path and inferred_graph_path are required");
      }
      const std::string id = store.create(body.at("base_graph_path").get<std::string>(),
                                          body.at("inferred_graph_path").get<std::string>());
      send_json(res, ordered_json{{"session_id", id}}.dump(), 201);
    }));

    http.Get(R"(/sessions/([^/]+)/overlay)",
             guarded([this](const httplib::Request& req, httplib::Response& res) {
               auto slot = store.get(req.matches[1]);
               std::shared_lock lock(slot->mutex);
               send_json(res, overlay_geojson(slot->session));
             }));

    http.Get(R"(/sessions/([^/]+)/base)",
             guarded([this](const httplib::Request& req, httplib::Response& res) {
               auto slot = store.get(req.matches[1]);
               std::shared_lock lock(slot->mutex);
               send_json(res, graph_to_geojson(slot->session.base()));
             }));

    http.Post(R"(/sessions/([^/]+)/segments/(-?\d+)/status)",
              guarded([this](const httplib::Request& req, httplib::Response& res) {
                auto slot = store.get(req.matches[1]);
                const SegmentId seg = std::stoll(req.matches[2]);
                const json body = body_object(req);
                const auto action = parse_action(body.value("action", std::string()));
                if (!action || *action == EditAction::kTeleport) {
                  throw ConfigError(R"(action must be "accept" or "reject")");
                }
                std::unique_lock lock(slot->mutex);
                slot->session.set_status(seg, *action);
                send_json(res, segment_feature_json(slot->session, seg));
              }));

    http.Post(R"(/sessions/([^/]+)/prune)",
              guarded([this](const httplib::Request& req, httplib::Response& res) {
                auto slot = store.get(req.matches[1]);
                const json body = body_object(req);
                PruneParams p;
                p.min_component_len = body.value("min_component_len", p.min_component_len);
                p.keep_importance_min = body.value("keep_importance_min", p.keep_importance_min);
                std::unique_lock lock(slot->mutex);
                const auto ids = slot->session.prune(p);
                send_json(res, ordered_json{{"rejected_ids", ids}}.dump());
              }));

    http.Post(R"(/sessions/([^/]+)/teleport)",
              guarded([this](const httplib::Request& req, httplib::Response& res) {
                auto slot = store.get(req.matches[1]);
                std::unique_lock lock(slot->mutex);
                const TeleportResult t = slot->session.teleport();
                if (t.empty) {
                  send_json(res, R"({"empty":true})");
                  return;
                }
                const Projection& proj = slot->session.inferred().projection();
                const LonLat lo = proj.unproject(t.bbox_min);
                const LonLat hi = proj.unproject(t.bbox_max);
                ordered_json j;
                j["bbox"] = {lo.lon, lo.lat, hi.lon, hi.lat};
                j["centroid"] = lonlat_json(proj, t.centroid);
                j["size_m"] = t.size_m;
                j["segment_ids"] = t.segments;
                send_json(res, j.dump());
              }));

    http.Get(R"(/sessions/([^/]+)/export)",
             guarded([this](const httplib::Request& req, httplib::Response& res) {
               auto slot = store.get(req.matches[1]);
               std::shared_lock lock(slot->mutex);
               res.set_content(write_graph(slot->session.export_graph()), "text/plain");
             }));

    if (opts.static_dir) http.set_mount_point("/", opts.static_dir->string());
  }
};

EditServer::EditServer(SessionStore& store, ServerOptions opts)
    : impl_(std::make_unique<Impl>(store, std::move(opts))) {
  impl_->routes();
}

EditServer::~EditServer() { stop(); }

int EditServer::bind() {
  if (impl_->opts.port == 0) {
    impl_->port = impl_->http.bind_to_any_port(impl_->opts.host);
  } else if (impl_->http.bind_to_port(impl_->opts.host, impl_->opts.port)) {
    impl_->port = impl_->opts.port;
  }
  if (impl_->port <= 0) {
    throw IoError("cannot bind " + impl_->opts.host + ":" + std::to_string(impl_->opts.port));
  }
  return impl_->port;
}

void EditServer::listen() { impl_->http.listen_after_bind(); }

void EditServer::stop() {
  if (impl_ && impl_->http.is_running()) impl_->http.stop();
}

}  // namespace roadtrace::edit
