#include <benchmark/benchmark.h>

#include <vector>

#include "mespot/lbp.hpp"
#include "mespot/metrics.hpp"
#include "mespot/rng.hpp"
#include "mespot/spotters.hpp"
#include "mespot/stfeatures.hpp"
#include "mespot/synth.hpp"

namespace {

using namespace mespot;

Raster noise_frame(int w, int h, SplitMix64& rng) {
  Raster r(w, h);
  for (auto& p : r.pixels()) p = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
  return r;
}

void BM_Match(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  SplitMix64 rng(1);
  std::vector<GroundTruthSample> gts;
  std::vector<Detection> dets;
  for (int i = 0; i < n; ++i) {
    gts.push_back({"v", "s", i * 100, i * 100 + static_cast<int>(rng.uniform_int(10, 51))});
    dets.push_back({"v", i * 100 + static_cast<int>(rng.uniform_int(-20, 60)), 35, rng.uniform()});
  }
  EvalConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(match(gts, dets, cfg));
  state.SetComplexityN(n);
}
BENCHMARK(BM_Match)->RangeMultiplier(4)->Range(4, 1024)->Complexity();

void BM_LbpBlockHistograms(benchmark::State& state) {
  SplitMix64 rng(2);
  const Raster r = noise_frame(128, 128, rng);
  for (auto _ : state) benchmark::DoNotOptimize(lbp_block_histograms(r, 6));
}
BENCHMARK(BM_LbpBlockHistograms);

void BM_Chi2Curve(benchmark::State& state) {
  auto cfg = FixtureConfig::clean_profile();
  cfg.videos = 1;
  cfg.subjects = 1;
  cfg.frames_per_video = static_cast<int>(state.range(0));
  const auto fx = generate_fixture(cfg);
  for (auto _ : state) benchmark::DoNotOptimize(chi2_contrast_curve(fx.sequences.front(), SpotterConfig{}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Chi2Curve)->Arg(500)->Arg(2200)->Unit(benchmark::kMillisecond);

void BM_StFeature(benchmark::State& state) {
  SplitMix64 rng(3);
  std::vector<Raster> vol;
  for (int t = 0; t < 35; ++t) vol.push_back(noise_frame(128, 128, rng));
  StFeatureConfig cfg;
  cfg.kind = static_cast<StFeatureKind>(state.range(0));
  state.SetLabel(std::string(to_string(cfg.kind)));
  for (auto _ : state) benchmark::DoNotOptimize(extract_st_feature(vol, cfg));
}
BENCHMARK(BM_StFeature)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
