#include "roadtrace/graph_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "roadtrace/error.hpp"

namespace roadtrace {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

struct RawVertex {
  VertexId id;
  LonLat ll;
};

struct RawEdge {
  std::size_t line;
  VertexId a;
  VertexId b;
  EdgeMeta meta;
};

}  // namespace

std::string format_fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  std::string s(buf);
  // Avoid "-0.0000000" so equal values print identically.
  if (s.find_first_not_of("-0.") == std::string::npos && s[0] == '-') {
    s.erase(0, 1);
  }
  return s;
}

RoadGraph read_graph(std::string_view text,
                     std::optional<Projection> projection) {
  std::optional<LonLat> origin;
  std::vector<RawVertex> vertices;
  std::vector<RawEdge> edges;
  std::set<VertexId> ids;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    auto tok = split_ws(line);
    if (tok.empty()) {
      if (nl == text.size()) break;
      continue;
    }
    if (tok[0].front() == '#') {
      if (tok[0] == "#" && tok.size() == 4 && tok[1] == "origin") {
        LonLat o;
        if (!parse_number(tok[2], o.lon) || !parse_number(tok[3], o.lat) ||
            !is_valid(o)) {
          throw ParseError(line_no, "malformed origin line");
        }
        origin = o;
      }
    } else if (tok[0] == "v") {
      if (!edges.empty()) {
        throw ParseError(line_no, "vertex line after edge lines");
      }
      RawVertex v;
      if (tok.size() != 4 || !parse_number(tok[1], v.id) ||
          !parse_number(tok[2], v.ll.lon) || !parse_number(tok[3], v.ll.lat)) {
        throw ParseError(line_no, "malformed vertex line");
      }
      if (!is_valid(v.ll)) {
        throw ParseError(line_no, "invalid coordinate for vertex " +
                                      std::to_string(v.id));
      }
      if (!ids.insert(v.id).second) {
        throw ParseError(line_no, "duplicate vertex id " + std::to_string(v.id));
      }
      vertices.push_back(v);
    } else if (tok[0] == "e") {
      RawEdge e{line_no, 0, 0, {0, Provenance::kBaseMap}};
      if (tok.size() < 3 || tok.size() > 5 || !parse_number(tok[1], e.a) ||
          !parse_number(tok[2], e.b)) {
        throw ParseError(line_no, "malformed edge line");
      }
      if (tok.size() >= 4 && !parse_number(tok[3], e.meta.support)) {
        throw ParseError(line_no, "malformed support count");
      }
      if (tok.size() == 5) {
        auto p = parse_provenance(tok[4]);
        if (!p) throw ParseError(line_no, "unknown provenance tag");
        e.meta.provenance = *p;
      }
      for (VertexId id : {e.a, e.b}) {
        if (!ids.count(id)) {
          throw ParseError(line_no, "undefined vertex id " + std::to_string(id));
        }
      }
      if (e.a == e.b) throw ParseError(line_no, "self-loop edge");
      edges.push_back(e);
    } else {
      throw ParseError(line_no, "unrecognized line");
    }
    if (nl == text.size()) break;
  }

  if (!projection) {
    if (origin) {
      projection = Projection(*origin);
    } else if (!vertices.empty()) {
      LonLat mean{};
      for (const auto& v : vertices) {
        mean.lon += v.ll.lon;
        mean.lat += v.ll.lat;
      }
      mean.lon /= static_cast<double>(vertices.size());
      mean.lat /= static_cast<double>(vertices.size());
      projection = Projection(mean);
    } else {
      projection = Projection();
    }
  }

  RoadGraph g(*projection);
  for (const auto& v : vertices) g.add_vertex(v.id, projection->project(v.ll));
  for (const auto& e : edges) {
    if (!g.add_edge(e.a, e.b, e.meta)) {
      throw ParseError(e.line, "duplicate edge " + std::to_string(e.a) + " " +
                                   std::to_string(e.b));
    }
  }
  return g;
}

std::string write_graph(const RoadGraph& g) {
  std::ostringstream out;
  const LonLat o = g.projection().origin();
  out << "# roadtrace graph\n";
  out << "# origin " << format_fixed(o.lon) << ' ' << format_fixed(o.lat)
      << '\n';
  for (const auto& [id, pos] : g.vertices()) {
    const LonLat ll = g.projection().unproject(pos);
    out << "v " << id << ' ' << format_fixed(ll.lon) << ' '
        << format_fixed(ll.lat) << '\n';
  }
  for (const auto& [key, meta] : g.edges()) {
    out << "e " << key.a << ' ' << key.b << ' ' << meta.support << ' '
        << to_string(meta.provenance) << '\n';
  }
  return out.str();
}

RoadGraph read_graph_file(const std::filesystem::path& path,
                          std::optional<Projection> projection) {
  return read_graph(read_text_file(path), projection);
}

void write_graph_file(const std::filesystem::path& path, const RoadGraph& g) {
  write_text_file(path, write_graph(g));
}

std::string graph_to_geojson(const RoadGraph& g) {
  nlohmann::json features = nlohmann::json::array();
  for (const auto& [key, meta] : g.edges()) {
    const LonLat a = g.projection().unproject(g.position(key.a));
    const LonLat b = g.projection().unproject(g.position(key.b));
    features.push_back({
        {"type", "Feature"},
        {"geometry",
         {{"type", "LineString"},
          {"coordinates", {{a.lon, a.lat}, {b.lon, b.lat}}}}},
        {"properties",
         {{"ids", {key.a, key.b}},
          {"support", meta.support},
          {"provenance", std::string(to_string(meta.provenance))}}},
    });
  }
  return nlohmann::json{{"type", "FeatureCollection"}, {"features", features}}
      .dump();
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace roadtrace
