#include <benchmark/benchmark.h>

#include <random>

#include "stlfd/fusion.hpp"
#include "stlfd/pipeline.hpp"
#include "stlfd/spatial.hpp"
#include "stlfd/synth.hpp"
#include "stlfd/window.hpp"

namespace {

using namespace stlfd;

Frame random_frame(int side) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Grid<double> g(side, side);
  for (double& v : g.values()) v = u(rng);
  return Frame(0, std::move(g));
}

FeatureMap random_map(int side) {
  const Frame f = random_frame(side);
  return FeatureMap(side, side, std::vector<double>(f.pixels().values().begin(), f.pixels().values().end()));
}

void BM_Smap(benchmark::State& state) {
  const Frame f = random_frame(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(compute_smap(f, {}));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Smap)->Arg(64)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_SmapReference(benchmark::State& state) {
  const Frame f = random_frame(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(compute_smap_reference(f, {}));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SmapReference)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_MaxFilter(benchmark::State& state) {
  const Frame f = random_frame(256);
  const int side = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(window::max_filter(f.pixels(), side));
}
BENCHMARK(BM_MaxFilter)->Arg(3)->Arg(15)->Unit(benchmark::kMillisecond);

void BM_AbsSuppress(benchmark::State& state) {
  const FeatureMap m = random_map(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(abs_suppress(m, {}));
}
BENCHMARK(BM_AbsSuppress)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_Segment(benchmark::State& state) {
  const FeatureMap m = random_map(256);
  for (auto _ : state) benchmark::DoNotOptimize(segment(m, {}));
}
BENCHMARK(BM_Segment)->Unit(benchmark::kMillisecond);

// Steady-state per-frame cost of the streaming detector on a 256x256 scene.
void BM_DetectorSteadyState(benchmark::State& state) {
  synth::SynthConfig sc = synth::preset_config(synth::Preset::kDrift);
  sc.frames = 64;
  const auto frames = synth::generate_frames(sc);
  Detector det(DetectorConfig{});
  std::size_t next = 0;
  for (; next < 11; ++next) det.process(frames[next]);
  for (auto _ : state) {
    if (next == frames.size()) {
      state.PauseTiming();
      det.reset();
      for (next = 0; next < 11; ++next) det.process(frames[next]);
      state.ResumeTiming();
    }
    benchmark::DoNotOptimize(det.process(frames[next++]));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_DetectorSteadyState)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
