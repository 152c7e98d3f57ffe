#include "cli.hpp"

#include <chrono>
#include <csignal>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <set>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "roadtrace/baseline.hpp"
#include "roadtrace/edit_server.hpp"
#include "roadtrace/error.hpp"
#include "roadtrace/eval.hpp"
#include "roadtrace/graph_io.hpp"
#include "roadtrace/refine.hpp"
#include "roadtrace/synth.hpp"
#include "roadtrace/tracer.hpp"

namespace roadtrace::cli {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// Reads typed keys from one section of the config file and rejects
// anything it was not asked for.
class Section {
 public:
  Section(const json& root, const std::string& name) : name_(name) {
    if (!root.contains(name)) return;
    obj_ = &root.at(name);
    if (!obj_->is_object()) throw ConfigError("config section '" + name + "' must be an object");
  }

  template <typename T>
  void get(const std::string& key, T& dst) {
    known_.insert(key);
    if (!obj_ || !obj_->contains(key)) return;
    const json& v = obj_->at(key);
    bool ok;
    if constexpr (std::is_same_v<T, bool>) {
      ok = v.is_boolean();
    } else if constexpr (std::is_integral_v<T>) {
      ok = v.is_number_integer();
    } else if constexpr (std::is_floating_point_v<T>) {
      ok = v.is_number();
    } else {
      ok = v.is_string();
    }
    if (!ok) throw ConfigError("config key '" + name_ + "." + key + "' has the wrong type");
    dst = v.get<T>();
  }

  void finish() const {
    if (!obj_) return;
    for (const auto& [key, value] : obj_->items()) {
      if (!known_.count(key)) throw ConfigError("unknown config key '" + name_ + "." + key + "'");
    }
  }

 private:
  std::string name_;
  const json* obj_ = nullptr;
  std::set<std::string> known_;
};

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  const json j = json::parse(read_text_file(path), nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ConfigError("config file " + path + " is not a JSON object");
  static const std::set<std::string> sections{"synth", "trace", "baseline", "refine", "eval", "serve"};
  for (const auto& [key, value] : j.items()) {
    if (!sections.count(key)) throw ConfigError("unknown config section '" + key + "'");
  }
  return j;
}

// Flags bound to shadow values so they only override the config file when
// actually given on the command line.
class Overrides {
 public:
  template <typename T>
  CLI::Option* add(CLI::App* app, const std::string& name, T& target, const std::string& desc) {
    auto shadow = std::make_shared<T>(target);
    CLI::Option* opt = app->add_option(name, *shadow, desc);
    opt->default_str(CLI::detail::to_string(target));
    apply_.push_back([opt, shadow, &target] {
      if (opt->count() > 0) target = *shadow;
    });
    return opt;
  }

  void apply() const {
    for (const auto& f : apply_) f();
  }

 private:
  std::vector<std::function<void()>> apply_;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void write_or_print(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    write_text_file(path, text);
  }
}

// ---- synth ----

struct SynthArgs {
  std::string graph = "grid";
  int n_blocks = 4;
  double block_m = 100.0;
  double length_m = 600.0;
  double origin_lon = 0.0;
  double origin_lat = 0.0;
  synth::SynthConfig cfg;
  std::string out_graph;
  std::string out_trajectories;
};

void read_section(const json& root, SynthArgs& a) {
  Section s(root, "synth");
  s.get("graph", a.graph);
  s.get("n_blocks", a.n_blocks);
  s.get("block_m", a.block_m);
  s.get("length_m", a.length_m);
  s.get("origin_lon", a.origin_lon);
  s.get("origin_lat", a.origin_lat);
  s.get("n_trips", a.cfg.n_trips);
  s.get("speed", a.cfg.speed);
  s.get("sample_interval", a.cfg.sample_interval);
  s.get("noise_sigma", a.cfg.noise_sigma);
  s.get("bias_radius", a.cfg.bias_radius);
  s.get("rng_seed", a.cfg.rng_seed);
  s.get("start_time", a.cfg.start_time);
  s.finish();
}

void add_flags(CLI::App* app, Overrides& o, SynthArgs& a) {
  o.add(app, "--graph", a.graph, "grid | two_crossing | straight");
  o.add(app, "--n-blocks", a.n_blocks, "grid blocks per side");
  o.add(app, "--block-m", a.block_m, "grid block length (m)");
  o.add(app, "--length-m", a.length_m, "road length for straight / two_crossing (m)");
  o.add(app, "--origin-lon", a.origin_lon, "longitude of the local origin");
  o.add(app, "--origin-lat", a.origin_lat, "latitude of the local origin");
  o.add(app, "--n-trips", a.cfg.n_trips, "number of trips");
  o.add(app, "--speed", a.cfg.speed, "m/s");
  o.add(app, "--sample-interval", a.cfg.sample_interval, "s");
  o.add(app, "--noise-sigma", a.cfg.noise_sigma, "per-axis GPS noise (m)");
  o.add(app, "--bias-radius", a.cfg.bias_radius, "per-trip bias disc radius (m)");
  o.add(app, "--seed", a.cfg.rng_seed, "RNG seed");
  o.add(app, "--start-time", a.cfg.start_time, "epoch seconds of the first trip");
  app->add_option("--out-graph", a.out_graph, "ground-truth graph file")->required();
  app->add_option("--out-trajectories", a.out_trajectories, "trajectory CSV")->required();
}

int run_synth(const SynthArgs& a, std::ostream& out) {
  synth::SynthConfig cfg = a.cfg;
  if (a.graph == "grid") {
    cfg.graph_kind = synth::Grid{a.n_blocks, a.block_m};
  } else if (a.graph == "two_crossing") {
    cfg.graph_kind = synth::TwoCrossingNoConnection{a.length_m};
  } else if (a.graph == "straight") {
    cfg.graph_kind = synth::Straight{a.length_m};
  } else {
    throw ConfigError("unknown graph kind '" + a.graph + "'");
  }
  synth::validate(cfg);
  const Projection proj(LonLat{a.origin_lon, a.origin_lat});
  const RoadGraph truth = synth::make_ground_truth(cfg.graph_kind, proj);
  const auto trips = synth::simulate_trips(truth, cfg);
  write_graph_file(a.out_graph, truth);
  write_text_file(a.out_trajectories, write_trajectories(trips, proj));
  out << "wrote " << truth.vertex_count() << " vertices, " << truth.edge_count() << " edges, "
      << trips.size() << " trajectories\n";
  return kOk;
}

// ---- shared trajectory loading ----

struct Loaded {
  Projection projection;
  std::vector<Trajectory> trajectories;
  RoadGraph base;
};

Loaded load_inputs(const std::string& input, const std::string& base_path,
                   const CleanConfig& clean_cfg) {
  Loaded l;
  std::optional<Projection> proj;
  if (!base_path.empty()) {
    l.base = read_graph_file(base_path);
    proj = l.base.projection();
  }
  TrajectorySet set = parse_trajectories(read_text_file(input), proj);
  l.projection = set.projection;
  if (base_path.empty()) l.base = RoadGraph(l.projection);
  l.trajectories = clean(set.trajectories, clean_cfg);
  return l;
}

// ---- trace ----

struct TraceArgs {
  TraceConfig cfg;
  CleanConfig clean;
  long long seeds = 3;
  std::string input;
  std::string base;
  std::string out;
  std::string report;
};

void read_section(const json& root, TraceArgs& a) {
  Section s(root, "trace");
  s.get("n_bins", a.cfg.n_bins);
  s.get("step_d", a.cfg.step_d);
  s.get("r_match", a.cfg.r_match);
  s.get("r_hist", a.cfg.r_hist);
  s.get("smooth_sigma_bins", a.cfg.smooth_sigma_bins);
  s.get("conf_threshold", a.cfg.conf_threshold);
  s.get("merge_radius", a.cfg.merge_radius);
  s.get("exclusion_halfwidth", a.cfg.exclusion_halfwidth);
  s.get("max_iterations", a.cfg.max_iterations);
  s.get("seeds", a.seeds);
  s.get("gap_s", a.clean.gap_s);
  s.get("v_max", a.clean.v_max);
  s.finish();
}

void add_flags(CLI::App* app, Overrides& o, TraceArgs& a) {
  app->add_option("--input", a.input, "trajectory CSV")->required();
  app->add_option("--base", a.base, "base graph to extend");
  app->add_option("--out", a.out, "output graph file")->required();
  app->add_option("--report", a.report, "JSON run report (default stdout)");
  o.add(app, "--n-bins", a.cfg.n_bins, "histogram bins");
  o.add(app, "--step-d", a.cfg.step_d, "step length (m)");
  o.add(app, "--r-match", a.cfg.r_match, "crossing disc radius (m)");
  o.add(app, "--r-hist", a.cfg.r_hist, "histogram circle radius (m)");
  o.add(app, "--smooth-sigma-bins", a.cfg.smooth_sigma_bins, "Gaussian smoothing (bins)");
  o.add(app, "--conf-threshold", a.cfg.conf_threshold, "minimum peak support (trajectories)");
  o.add(app, "--merge-radius", a.cfg.merge_radius, "vertex merge radius (m)");
  o.add(app, "--exclusion-halfwidth", a.cfg.exclusion_halfwidth, "explored-direction halfwidth (deg)");
  o.add(app, "--max-iterations", a.cfg.max_iterations, "iteration cap");
  o.add(app, "--seeds", a.seeds, "number of density seeds");
  o.add(app, "--gap-s", a.clean.gap_s, "split trajectories at gaps longer than this (s)");
  o.add(app, "--v-max", a.clean.v_max, "drop points implying higher speed (m/s)");
}

int run_trace(const TraceArgs& a, std::ostream& out) {
  validate(a.cfg);
  if (a.seeds < 0) throw ConfigError("seeds must be >= 0");
  const auto t0 = std::chrono::steady_clock::now();
  Loaded l = load_inputs(a.input, a.base, a.clean);
  const std::size_t n_trajs = l.trajectories.size();
  const TrajIndex index = build_index(std::move(l.trajectories), a.cfg.r_hist);
  const auto seeds = detect_seeds(index, a.cfg, static_cast<std::size_t>(a.seeds));
  const GpsOracle oracle(index, a.cfg);
  const TraceResult r = trace(l.base, seeds, oracle, a.cfg);
  write_graph_file(a.out, r.graph);

  ordered_json rep;
  rep["iterations"] = r.iterations;
  rep["edges_added"] = r.edges_added;
  rep["stop_reason"] = to_string(r.stop_reason);
  rep["truncated"] = r.truncated();
  rep["trajectories"] = n_trajs;
  rep["seeds"] = seeds.size();
  rep["vertices"] = r.graph.vertex_count();
  rep["edges"] = r.graph.edge_count();
  rep["wall_time_s"] = seconds_since(t0);
  write_or_print(a.report, rep.dump(2) + "\n", out);
  return kOk;
}

// ---- baseline ----

struct BaselineArgs {
  double cell_size = 5.0;
  int threshold = 2;
  CleanConfig clean;
  std::string input;
  std::string out;
  std::string report;
};

void read_section(const json& root, BaselineArgs& a) {
  Section s(root, "baseline");
  s.get("cell_size", a.cell_size);
  s.get("threshold", a.threshold);
  s.get("gap_s", a.clean.gap_s);
  s.get("v_max", a.clean.v_max);
  s.finish();
}

void add_flags(CLI::App* app, Overrides& o, BaselineArgs& a) {
  app->add_option("--input", a.input, "trajectory CSV")->required();
  app->add_option("--out", a.out, "output graph file")->required();
  app->add_option("--report", a.report, "JSON run report (default stdout)");
  o.add(app, "--cell-size", a.cell_size, "grid cell size (m)");
  o.add(app, "--threshold", a.threshold, "minimum distinct trajectories per road cell");
  o.add(app, "--gap-s", a.clean.gap_s, "split trajectories at gaps longer than this (s)");
  o.add(app, "--v-max", a.clean.v_max, "drop points implying higher speed (m/s)");
}

int run_baseline(const BaselineArgs& a, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const Loaded l = load_inputs(a.input, "", a.clean);
  const DensityGrid grid = density_grid(l.trajectories, a.cell_size);
  const RoadGraph g = extract_graph(grid, a.threshold, l.projection);
  write_graph_file(a.out, g);

  ordered_json rep;
  rep["trajectories"] = l.trajectories.size();
  rep["grid_width"] = grid.width;
  rep["grid_height"] = grid.height;
  rep["vertices"] = g.vertex_count();
  rep["edges"] = g.edge_count();
  rep["total_length_m"] = g.total_length();
  rep["wall_time_s"] = seconds_since(t0);
  write_or_print(a.report, rep.dump(2) + "\n", out);
  return kOk;
}

// ---- refine ----

struct RefineArgs {
  RefineConfig cfg;
  std::string input;
  std::string out;
};

void read_section(const json& root, RefineArgs& a) {
  Section s(root, "refine");
  s.get("junction_snap", a.cfg.junction_snap);
  s.get("simplify_tol", a.cfg.simplify_tol);
  s.get("smooth_window", a.cfg.smooth_window);
  s.get("min_component_len", a.cfg.min_component_len);
  s.get("corner_angle", a.cfg.corner_angle);
  s.finish();
}

void add_flags(CLI::App* app, Overrides& o, RefineArgs& a) {
  app->add_option("--input", a.input, "graph file")->required();
  app->add_option("--out", a.out, "output graph file")->required();
  o.add(app, "--junction-snap", a.cfg.junction_snap, "junction merge radius (m)");
  o.add(app, "--simplify-tol", a.cfg.simplify_tol, "Douglas-Peucker tolerance (m)");
  o.add(app, "--smooth-window", a.cfg.smooth_window, "moving-average window (vertices)");
  o.add(app, "--min-component-len", a.cfg.min_component_len, "drop smaller components (m)");
  o.add(app, "--corner-angle", a.cfg.corner_angle, "turns above this stay fixed (deg)");
}

int run_refine(const RefineArgs& a, std::ostream& out) {
  validate(a.cfg);
  const RoadGraph g = read_graph_file(a.input);
  const RoadGraph r = refine_geometry(g, a.cfg);
  write_graph_file(a.out, r);
  out << "refined " << g.edge_count() << " -> " << r.edge_count() << " edges\n";
  return kOk;
}

// ---- eval ----

struct EvalArgs {
  EvalConfig cfg;
  std::string inferred;
  std::string truth;
  std::string out;
};

void read_section(const json& root, EvalArgs& a) {
  Section s(root, "eval");
  s.get("sample_spacing", a.cfg.sample_spacing);
  s.get("d_match", a.cfg.d_match);
  s.finish();
}

void add_flags(CLI::App* app, Overrides& o, EvalArgs& a) {
  app->add_option("inferred", a.inferred, "inferred graph file")->required();
  app->add_option("truth", a.truth, "ground-truth graph file")->required();
  app->add_option("--out", a.out, "JSON report (default stdout)");
  o.add(app, "--sample-spacing", a.cfg.sample_spacing, "sample spacing along edges (m)");
  o.add(app, "--d-match", a.cfg.d_match, "match distance (m)");
}

int run_eval(const EvalArgs& a, std::ostream& out) {
  if (!(a.cfg.sample_spacing > 0.0) || !(a.cfg.d_match > 0.0)) {
    throw ConfigError("sample_spacing and d_match must be positive");
  }
  const RoadGraph inferred = read_graph_file(a.inferred);
  const RoadGraph truth = read_graph_file(a.truth);
  write_or_print(a.out, to_json(geo_precision_recall(inferred, truth, a.cfg)) + "\n", out);
  return kOk;
}

// ---- serve ----

struct ServeArgs {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string data_dir = ".";
  std::string static_dir;
  edit::SessionConfig cfg;
};

void read_section(const json& root, ServeArgs& a) {
  Section s(root, "serve");
  s.get("host", a.host);
  s.get("port", a.port);
  s.get("data_dir", a.data_dir);
  s.get("static_dir", a.static_dir);
  s.get("merge_radius", a.cfg.merge_radius);
  s.get("weld_radius", a.cfg.weld_radius);
  s.finish();
}

void add_flags(CLI::App* app, Overrides& o, ServeArgs& a) {
  o.add(app, "--host", a.host, "listen address");
  o.add(app, "--port", a.port, "listen port");
  o.add(app, "--data-dir", a.data_dir, "graph files and session checkpoints");
  o.add(app, "--static-dir", a.static_dir, "editor assets served at /");
  o.add(app, "--merge-radius", a.cfg.merge_radius, "overlay duplicate radius (m)");
  o.add(app, "--weld-radius", a.cfg.weld_radius, "export weld radius (m)");
}

edit::EditServer* g_server = nullptr;

extern "C" void handle_signal(int) {
  if (g_server) g_server->stop();
}

int run_serve(const ServeArgs& a, std::ostream& out) {
  if (a.port < 0 || a.port > 65535) throw ConfigError("port out of range");
  edit::SessionStore store(a.data_dir, a.cfg);
  const std::size_t restored = store.load_existing();
  edit::ServerOptions opts;
  opts.host = a.host;
  opts.port = a.port;
  if (!a.static_dir.empty()) opts.static_dir = a.static_dir;
  edit::EditServer server(store, opts);
  const int port = server.bind();
  out << "listening on " << a.host << ":" << port << " (" << restored << " sessions restored)"
      << std::endl;
  g_server = &server;
  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);
  server.listen();
  g_server = nullptr;
  return kOk;
}

template <typename Args>
struct Command {
  Args args;
  Overrides overrides;
};

}  // namespace

int dispatch(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Road network inference from GPS trajectories", "roadtrace"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file with per-command sections")
      ->check(CLI::ExistingFile);

  Command<SynthArgs> synth_cmd;
  Command<TraceArgs> trace_cmd;
  Command<BaselineArgs> baseline_cmd;
  Command<RefineArgs> refine_cmd;
  Command<EvalArgs> eval_cmd;
  Command<ServeArgs> serve_cmd;

  auto* synth = app.add_subcommand("synth", "generate a ground-truth graph and noisy trips");
  auto* trace = app.add_subcommand("trace", "infer a road graph by iterative tracing");
  auto* baseline = app.add_subcommand("baseline", "infer a road graph by density thresholding");
  auto* refine = app.add_subcommand("refine", "snap junctions and smooth geometry");
  auto* eval = app.add_subcommand("eval", "GEO precision and recall of a graph against truth");
  auto* serve = app.add_subcommand("serve", "run the edit service");
  for (CLI::App* sub : {synth, trace, baseline, refine, eval, serve}) {
    // Accept --config after the subcommand name too.
    sub->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  }
  add_flags(synth, synth_cmd.overrides, synth_cmd.args);
  add_flags(trace, trace_cmd.overrides, trace_cmd.args);
  add_flags(baseline, baseline_cmd.overrides, baseline_cmd.args);
  add_flags(refine, refine_cmd.overrides, refine_cmd.args);
  add_flags(eval, eval_cmd.overrides, eval_cmd.args);
  add_flags(serve, serve_cmd.overrides, serve_cmd.args);

  std::vector<std::string> reversed(argv.rbegin(), argv.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << sub->help();
    return kUsage;
  }

  // Loads the file, then lets explicit flags win.
  auto configure = [&](auto& cmd) {
    const json root = load_config(config_path);
    read_section(root, cmd.args);
    cmd.overrides.apply();
  };

  try {
    if (synth->parsed()) {
      configure(synth_cmd);
      return run_synth(synth_cmd.args, out);
    }
    if (trace->parsed()) {
      configure(trace_cmd);
      return run_trace(trace_cmd.args, out);
    }
    if (baseline->parsed()) {
      configure(baseline_cmd);
      return run_baseline(baseline_cmd.args, out);
    }
    if (refine->parsed()) {
      configure(refine_cmd);
      return run_refine(refine_cmd.args, out);
    }
    if (eval->parsed()) {
      configure(eval_cmd);
      return run_eval(eval_cmd.args, out);
    }
    if (serve->parsed()) {
      configure(serve_cmd);
      return run_serve(serve_cmd.args, out);
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  }
  err << app.help();
  return kUsage;
}

int dispatch(int argc, char** argv) {
  std::vector<std::string> args(argv + (argc > 0 ? 1 : 0), argv + argc);
  return dispatch(args, std::cout, std::cerr);
}

}  // namespace roadtrace::cli
