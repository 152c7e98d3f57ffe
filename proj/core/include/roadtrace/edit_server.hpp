#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>

#include "roadtrace/edit_session.hpp"

namespace roadtrace::edit {

// A session plus the lock that serializes its mutations.
struct SessionSlot {
  explicit SessionSlot(Session s) : session(std::move(s)) {}
  Session session;
  std::shared_mutex mutex;
};

// Owns every live session. Each session writes <id>.session.json (its input
// paths) and appends one JSON line per action to <id>.log.jsonl in data_dir,
// so a restarted store resumes where it stopped.
class SessionStore {
 public:
  explicit SessionStore(std::filesystem::path data_dir, SessionConfig cfg = {});

  // Relative paths resolve against data_dir. The inferred graph is read in the
  // base graph's projection. Returns the new session id.
  std::string create(const std::string& base_path, const std::string& inferred_path);

  // Reloads every session found in data_dir and replays its log.
  // Returns the number of sessions restored.
  std::size_t load_existing();

  // Throws NotFound.
  std::shared_ptr<SessionSlot> get(const std::string& id) const;

  const std::filesystem::path& data_dir() const { return dir_; }

 private:
  std::shared_ptr<SessionSlot> open(const std::string& id, const std::string& base_path,
                                    const std::string& inferred_path);
  std::filesystem::path resolve(const std::string& p) const;

  std::filesystem::path dir_;
  SessionConfig cfg_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<SessionSlot>> sessions_;
  long long next_id_ = 1;
};

// GeoJSON FeatureCollection of the overlay (properties segment_id, status,
// support), and the single feature for one segment.
std::string overlay_geojson(const Session& s);
std::string segment_feature_json(const Session& s, SegmentId id);

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 binds any free port
  std::optional<std::filesystem::path> static_dir;
};

// HTTP JSON front end over a SessionStore.
class EditServer {
 public:
  EditServer(SessionStore& store, ServerOptions opts);
  ~EditServer();
  EditServer(const EditServer&) = delete;
  EditServer& operator=(const EditServer&) = delete;

  // Binds the socket; returns the bound port. Throws IoError on failure.
  int bind();
  // Serves until stop(); call bind() first.
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace roadtrace::edit
