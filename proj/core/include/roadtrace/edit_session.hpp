#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "roadtrace/graph.hpp"

namespace roadtrace::edit {

using SegmentId = std::int64_t;

enum class SegmentStatus { kPending, kAccepted, kRejected };
std::string_view to_string(SegmentStatus s);

// One inferred edge offered to the editor for validation.
struct OverlaySegment {
  SegmentId id = 0;
  EdgeKey edge;  // vertex ids in the inferred graph
  SegmentStatus status = SegmentStatus::kPending;
  int support = 0;
};

enum class EditAction { kAccept, kReject, kTeleport };
std::string_view to_string(EditAction a);
std::optional<EditAction> parse_action(std::string_view s);

struct LogEntry {
  double time = 0.0;      // epoch seconds
  SegmentId segment = -1;  // -1 for teleport
  EditAction action = EditAction::kAccept;
  std::string source = "user";  // "user" or "prune"

  friend bool operator==(const LogEntry&, const LogEntry&) = default;
};

std::string to_json_line(const LogEntry& e);
LogEntry parse_log_line(std::string_view line);

struct SessionConfig {
  // Inferred edges whose endpoints both lie this close to a base edge's
  // endpoints already exist in the base; also the gate radius for prune.
  double merge_radius = 10.0;
  // Export welds accepted endpoints to base vertices within this distance.
  double weld_radius = 15.0;
};

struct PruneParams {
  double min_component_len = 50.0;
  int keep_importance_min = 1;
};

struct TeleportResult {
  bool empty = true;
  XY bbox_min;
  XY bbox_max;
  XY centroid;
  double size_m = 0.0;
  std::vector<SegmentId> segments;
};

// Editing state over a base map and an inferred graph. Not thread-safe;
// callers serialize mutations (the HTTP layer holds a per-session lock).
class Session {
 public:
  // Throws ConfigError if the graphs use different projections.
  Session(std::string id, RoadGraph base, RoadGraph inferred, SessionConfig cfg = {});

  const std::string& id() const { return id_; }
  const SessionConfig& config() const { return cfg_; }
  const RoadGraph& base() const { return base_; }
  const RoadGraph& inferred() const { return inferred_; }
  const std::vector<OverlaySegment>& overlay() const { return overlay_; }
  const std::vector<LogEntry>& action_log() const { return log_; }
  std::size_t teleport_cursor() const { return cursor_; }

  // Throws NotFound for an unknown id.
  const OverlaySegment& segment(SegmentId id) const;

  // Last decision wins. Throws NotFound for unknown ids and ConfigError for
  // kTeleport.
  const OverlaySegment& set_status(SegmentId id, EditAction action);

  // Rejects pending segments off every shortest path between gate pairs of
  // their pending component, plus whole pending components shorter than
  // min_component_len. Returns the newly rejected ids, ascending.
  std::vector<SegmentId> prune(const PruneParams& params = {});

  // Next overlay component (largest first, cycling) that still has pending
  // segments; empty when nothing is pending.
  TeleportResult teleport();

  // Base map plus the accepted segments.
  RoadGraph export_graph() const;

  // Applies logged entries in order, appending them to this session's log.
  void replay(const std::vector<LogEntry>& entries);

  // Called after every appended log entry (used for on-disk checkpoints).
  void set_log_sink(std::function<void(const LogEntry&)> sink) { sink_ = std::move(sink); }

  std::size_t count(SegmentStatus s) const;

 private:
  struct Component {
    std::vector<SegmentId> segments;
    double length = 0.0;
  };

  OverlaySegment& mutable_segment(SegmentId id);
  void append(LogEntry e);
  TeleportResult teleport_internal();
  double segment_length(const OverlaySegment& s) const;

  std::string id_;
  SessionConfig cfg_;
  RoadGraph base_;
  RoadGraph inferred_;
  std::vector<OverlaySegment> overlay_;
  std::vector<Component> components_;  // teleport order
  std::size_t cursor_ = 0;
  std::vector<LogEntry> log_;
  std::function<void(const LogEntry&)> sink_;
};

Session create_session(std::string id, RoadGraph base, RoadGraph inferred,
                       SessionConfig cfg = {});

// Stable 64-bit FNV-1a, used to seed prune's gate-pair sampling.
std::uint64_t fnv1a(std::string_view s);

}  // namespace roadtrace::edit
