#include <random>

#include <benchmark/benchmark.h>

#include "roadtrace/baseline.hpp"
#include "roadtrace/eval.hpp"
#include "roadtrace/refine.hpp"
#include "roadtrace/synth.hpp"
#include "roadtrace/tracer.hpp"

using namespace roadtrace;

namespace {

struct City {
  RoadGraph truth;
  std::vector<Trajectory> trips;
};

City city(int blocks, int n_trips) {
  City c{synth::make_ground_truth(synth::Grid{blocks, 100}), {}};
  synth::SynthConfig sc;
  sc.n_trips = n_trips;
  sc.rng_seed = 1;
  c.trips = synth::simulate_trips(c.truth, sc);
  return c;
}

void BM_IndexQuery(benchmark::State& state) {
  const City c = city(4, static_cast<int>(state.range(0)));
  const TrajIndex idx = build_index(c.trips, 30);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> q(0, 400);
  for (auto _ : state) {
    benchmark::DoNotOptimize(query_crossings(idx, {q(rng), q(rng)}, 12));
  }
}
BENCHMARK(BM_IndexQuery)->Arg(100)->Arg(400)->Arg(1600);

void BM_Histogram(benchmark::State& state) {
  const City c = city(4, static_cast<int>(state.range(0)));
  const TraceConfig cfg;
  const TrajIndex idx = build_index(c.trips, cfg.r_hist);
  for (auto _ : state) {
    benchmark::DoNotOptimize(compute_polar_histogram(idx, {200, 200}, cfg));
  }
}
BENCHMARK(BM_Histogram)->Arg(100)->Arg(400)->Arg(1600);

void BM_TraceGrid(benchmark::State& state) {
  const int blocks = static_cast<int>(state.range(0));
  const City c = city(blocks, 100 * blocks * blocks);
  const TraceConfig cfg;
  const TrajIndex idx = build_index(c.trips, cfg.r_hist);
  const GpsOracle o(idx, cfg);
  const auto seeds = detect_seeds(idx, cfg, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(trace(RoadGraph(), seeds, o, cfg));
  }
}
BENCHMARK(BM_TraceGrid)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_Refine(benchmark::State& state) {
  const City c = city(4, 400);
  const TraceConfig cfg;
  const TrajIndex idx = build_index(c.trips, cfg.r_hist);
  const RoadGraph traced =
      trace(RoadGraph(), detect_seeds(idx, cfg, 3), GpsOracle(idx, cfg), cfg).graph;
  for (auto _ : state) benchmark::DoNotOptimize(refine_geometry(traced));
}
BENCHMARK(BM_Refine)->Unit(benchmark::kMillisecond);

void BM_Baseline(benchmark::State& state) {
  const City c = city(4, 400);
  for (auto _ : state) {
    benchmark::DoNotOptimize(extract_graph(density_grid(c.trips, 5), 2));
  }
}
BENCHMARK(BM_Baseline)->Unit(benchmark::kMillisecond);

void BM_Eval(benchmark::State& state) {
  const int blocks = static_cast<int>(state.range(0));
  const RoadGraph truth = synth::make_ground_truth(synth::Grid{blocks, 100});
  for (auto _ : state) benchmark::DoNotOptimize(geo_precision_recall(truth, truth));
}
BENCHMARK(BM_Eval)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
