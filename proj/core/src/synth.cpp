#include "roadtrace/synth.hpp"

#include <cmath>
#include <random>
#include <string>

#include "roadtrace/error.hpp"

namespace roadtrace::synth {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mt19937_64 trip_stream(std::uint64_t seed, std::uint64_t trip) {
  return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(trip + 1)));
}

void add_polyline(RoadGraph& g, const std::vector<XY>& pts) {
  VertexId prev = -1;
  for (const XY& p : pts) {
    const VertexId id = g.add_vertex(p);
    if (prev >= 0) g.add_edge(prev, id, {0, Provenance::kBaseMap});
    prev = id;
  }
}

// Points every `spacing` meters of arc length along the polyline, starting
// at its first vertex.
std::vector<XY> sample_polyline(const std::vector<XY>& line, double spacing) {
  std::vector<XY> out;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < line.size(); ++i) {
    total += distance(line[i], line[i + 1]);
  }
  const auto n = static_cast<std::size_t>(std::floor(total / spacing + 1e-9));
  std::size_t seg = 0;
  double seg_start = 0.0;
  for (std::size_t k = 0; k <= n; ++k) {
    const double s = std::min(k * spacing, total);
    while (seg + 2 < line.size() &&
           seg_start + distance(line[seg], line[seg + 1]) < s) {
      seg_start += distance(line[seg], line[seg + 1]);
      ++seg;
    }
    const double len = distance(line[seg], line[seg + 1]);
    const double t = len > 0.0 ? std::clamp((s - seg_start) / len, 0.0, 1.0) : 0.0;
    out.push_back(line[seg] + (line[seg + 1] - line[seg]) * t);
  }
  return out;
}

}  // namespace

void validate(const SynthConfig& cfg) {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (cfg.n_trips < 0) throw ConfigError("n_trips must be >= 0");
  if (!positive(cfg.speed)) throw ConfigError("speed must be positive");
  if (!positive(cfg.sample_interval)) {
    throw ConfigError("sample_interval must be positive");
  }
  if (!(cfg.noise_sigma >= 0.0)) throw ConfigError("noise_sigma must be >= 0");
  if (!(cfg.bias_radius >= 0.0)) throw ConfigError("bias_radius must be >= 0");
  std::visit(
      [&](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Grid>) {
          if (k.n_blocks < 1 || !positive(k.block_m)) {
            throw ConfigError("grid needs n_blocks >= 1 and block_m > 0");
          }
        } else {
          if (!positive(k.length_m)) throw ConfigError("length_m must be positive");
        }
      },
      cfg.graph_kind);
}

RoadGraph make_ground_truth(const GraphKind& kind, const Projection& projection) {
  RoadGraph g(projection);
  if (const auto* grid = std::get_if<Grid>(&kind)) {
    const int n = grid->n_blocks;
    for (int j = 0; j <= n; ++j) {
      for (int i = 0; i <= n; ++i) {
        g.add_vertex(j * (n + 1) + i, {i * grid->block_m, j * grid->block_m});
      }
    }
    const EdgeMeta meta{0, Provenance::kBaseMap};
    for (int j = 0; j <= n; ++j) {
      for (int i = 0; i <= n; ++i) {
        const VertexId v = j * (n + 1) + i;
        if (i < n) g.add_edge(v, v + 1, meta);
        if (j < n) g.add_edge(v, v + n + 1, meta);
      }
    }
  } else if (const auto* cross = std::get_if<TwoCrossingNoConnection>(&kind)) {
    // Neither polyline has a vertex at the shared crossing point.
    const double h = cross->length_m / 2.0;
    const double m = cross->length_m / 6.0;
    add_polyline(g, {{-h, 0.0}, {-m, 0.0}, {m, 0.0}, {h, 0.0}});
    add_polyline(g, {{0.0, -h}, {0.0, -m}, {0.0, m}, {0.0, h}});
  } else {
    const auto& s = std::get<Straight>(kind);
    add_polyline(g, {{0.0, 0.0}, {s.length_m, 0.0}});
  }
  return g;
}

std::vector<Trajectory> simulate_trips(const RoadGraph& truth,
                                       const SynthConfig& cfg) {
  validate(cfg);
  std::vector<Trajectory> out;
  if (cfg.n_trips == 0) return out;

  std::vector<VertexId> ids;
  for (const auto& [id, pos] : truth.vertices()) ids.push_back(id);
  if (ids.size() < 2) throw GenerationError("ground truth has fewer than 2 vertices");

  const long long budget = 10LL * cfg.n_trips;
  long long attempts = 0;
  const double spacing = cfg.speed * cfg.sample_interval;
  std::map<VertexId, ShortestPathTree> trees;

  for (int trip = 0; trip < cfg.n_trips; ++trip) {
    auto rng = trip_stream(cfg.rng_seed, static_cast<std::uint64_t>(trip));
    std::uniform_int_distribution<std::size_t> pick(0, ids.size() - 1);
    std::vector<VertexId> path;
    while (path.size() < 2) {
      if (++attempts > budget) {
        throw GenerationError("could not route " + std::to_string(cfg.n_trips) +
                              " trips within " + std::to_string(budget) +
                              " attempts");
      }
      const VertexId src = ids[pick(rng)];
      const VertexId dst = ids[pick(rng)];
      if (src == dst) continue;
      auto it = trees.find(src);
      if (it == trees.end()) it = trees.emplace(src, dijkstra(truth, src)).first;
      path = path_to(it->second, dst);
    }

    std::vector<XY> line;
    for (VertexId v : path) line.push_back(truth.position(v));

    XY bias{};
    if (cfg.bias_radius > 0.0) {
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      const double r = cfg.bias_radius * std::sqrt(unit(rng));
      const double a = 2.0 * kPi * unit(rng);
      bias = {r * std::cos(a), r * std::sin(a)};
    }
    std::normal_distribution<double> noise(0.0, 1.0);

    Trajectory tr{"trip_" + std::to_string(trip), {}};
    const double t0 = cfg.start_time + 3600.0 * trip;
    const auto samples = sample_polyline(line, spacing);
    for (std::size_t k = 0; k < samples.size(); ++k) {
      XY p = samples[k] + bias;
      if (cfg.noise_sigma > 0.0) {
        const double nx = noise(rng);
        const double ny = noise(rng);
        p = p + XY{nx, ny} * cfg.noise_sigma;
      }
      tr.points.push_back({t0 + k * cfg.sample_interval, p});
    }
    out.push_back(std::move(tr));
  }
  return out;
}

}  // namespace roadtrace::synth
