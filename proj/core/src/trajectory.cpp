#include "roadtrace/trajectory.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>
#include <unordered_map>

#include "roadtrace/error.hpp"
#include "roadtrace/graph_io.hpp"

namespace roadtrace {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end && !s.empty();
}

struct RawRow {
  std::string id;
  double t;
  LonLat ll;
};

}  // namespace

TrajectorySet parse_trajectories(std::string_view csv,
                                 std::optional<Projection> projection) {
  std::vector<RawRow> rows;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool header_seen = false;
  while (pos < csv.size()) {
    std::size_t nl = csv.find('\n', pos);
    if (nl == std::string_view::npos) nl = csv.size();
    std::string_view line = trim(csv.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != "traj_id,timestamp,lon,lat") {
        throw ParseError(line_no, "expected header traj_id,timestamp,lon,lat");
      }
      header_seen = true;
      continue;
    }
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      std::size_t comma = line.find(',', start);
      fields.push_back(line.substr(start, comma == std::string_view::npos
                                              ? std::string_view::npos
                                              : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    RawRow row;
    if (fields.size() != 4 || trim(fields[0]).empty() || !parse_double(fields[1], row.t) ||
        !parse_double(fields[2], row.ll.lon) ||
        !parse_double(fields[3], row.ll.lat) || !std::isfinite(row.t)) {
      throw ParseError(line_no, "malformed trajectory row");
    }
    if (!is_valid(row.ll)) {
      throw InvalidCoordinate("line " + std::to_string(line_no) +
                              ": coordinate out of range");
    }
    row.id = std::string(trim(fields[0]));
    rows.push_back(std::move(row));
  }
  if (!header_seen) throw ParseError(1, "missing header");

  if (!projection) {
    LonLat mean{};
    for (const auto& r : rows) {
      mean.lon += r.ll.lon;
      mean.lat += r.ll.lat;
    }
    if (!rows.empty()) {
      mean.lon /= static_cast<double>(rows.size());
      mean.lat /= static_cast<double>(rows.size());
    }
    projection = Projection(mean);
  }

  TrajectorySet out{*projection, {}};
  std::unordered_map<std::string, std::size_t> slot;
  for (const auto& r : rows) {
    auto [it, inserted] = slot.emplace(r.id, out.trajectories.size());
    if (inserted) out.trajectories.push_back({r.id, {}});
    out.trajectories[it->second].points.push_back(
        {r.t, projection->project(r.ll)});
  }
  for (auto& tr : out.trajectories) {
    std::stable_sort(tr.points.begin(), tr.points.end(),
                     [](const TrajPoint& a, const TrajPoint& b) { return a.t < b.t; });
  }
  return out;
}

std::string write_trajectories(const std::vector<Trajectory>& trajs,
                               const Projection& projection) {
  std::ostringstream out;
  out << "traj_id,timestamp,lon,lat\n";
  for (const auto& tr : trajs) {
    for (const auto& p : tr.points) {
      const LonLat ll = projection.unproject(p.pos);
      out << tr.id << ',' << format_fixed(p.t, 3) << ',' << format_fixed(ll.lon)
          << ',' << format_fixed(ll.lat) << '\n';
    }
  }
  return out.str();
}

std::vector<Trajectory> clean(const std::vector<Trajectory>& trajs,
                              const CleanConfig& cfg) {
  std::vector<Trajectory> out;
  for (const auto& tr : trajs) {
    std::vector<std::vector<TrajPoint>> pieces;
    for (const auto& p : tr.points) {
      if (pieces.empty()) {
        pieces.push_back({p});
        continue;
      }
      const TrajPoint& last = pieces.back().back();
      const double dt = p.t - last.t;
      if (dt > cfg.gap_s) {
        pieces.push_back({p});
      } else if (dt > 0.0 && distance(p.pos, last.pos) / dt <= cfg.v_max) {
        pieces.back().push_back(p);
      }
      // Otherwise the point repeats a timestamp or implies an impossible
      // speed; it is dropped.
    }
    for (std::size_t k = 0; k < pieces.size(); ++k) {
      if (pieces[k].size() < 2) continue;
      std::string id = pieces.size() == 1 ? tr.id : tr.id + "#" + std::to_string(k);
      out.push_back({std::move(id), std::move(pieces[k])});
    }
  }
  return out;
}

}  // namespace roadtrace
