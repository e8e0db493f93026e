#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "mespot/error.hpp"
#include "mespot/rng.hpp"
#include "mespot/spotters.hpp"
#include "mespot/stfeatures.hpp"

namespace mespot {

std::vector<int> resample_indices(int start, int length, int target) {
  if (length < 1 || target < 1) fail(ErrorKind::Argument, "resampling needs positive lengths");
  std::vector<int> idx(target);
  for (int j = 0; j < target; ++j) {
    const int offset = static_cast<int>(std::floor((j + 0.5) * length / target));
    idx[j] = start + std::min(length - 1, offset);
  }
  return idx;
}

std::vector<double> window_feature(const FrameSequence& seq, int start, int length, const StFeatureConfig& cfg) {
  if (start < 0 || length < 1 || start + length > seq.frame_count()) {
    fail(ErrorKind::Argument, fmt::format("window [{}, {}) outside video {}", start, start + length, seq.video_id));
  }
  std::vector<Raster> volume;
  volume.reserve(cfg.window_length);
  for (const int i : resample_indices(start, length, cfg.window_length)) volume.push_back(seq.frames[i]);
  return extract_st_feature(volume, cfg);
}

std::vector<Detection> spot_supervised(const FrameSequence& seq, const LinearModel& model) {
  const StFeatureConfig& cfg = model.features;
  cfg.validate();
  seq.validate();
  if (model.weights.size() != cfg.feature_length()) {
    fail(ErrorKind::Configuration, "model weights do not match its feature configuration");
  }
  const int n = seq.frame_count();
  std::vector<Detection> dets;
  for (const double scale : cfg.scales) {
    const int len = std::max(1, static_cast<int>(std::lround(cfg.window_length * scale)));
    if (len > n) continue;
    const int stride = (len + 3) / 4;
    for (int start = 0; start + len <= n; start += stride) {
      const double score = model.decision(window_feature(seq, start, len, cfg));
      if (score > 0.0) dets.push_back({seq.video_id, start + (len - 1) / 2, len, score});
    }
  }
  return nms(dets, cfg.window_length);
}

std::vector<TrainingWindow> plan_training_windows(std::span<const VideoLayout> videos, int window_length,
                                                  int negatives_per_positive, std::uint64_t seed) {
  if (negatives_per_positive < 1) fail(ErrorKind::Configuration, "need at least one negative per positive");
  const int L = window_length;
  const int lead = L / 2;
  const int trail = L - 1 - lead;

  std::vector<TrainingWindow> windows;
  std::vector<TrainingWindow> pool;
  for (std::size_t v = 0; v < videos.size(); ++v) {
    const int n = videos[v].frame_count;
    if (n < L) fail(ErrorKind::SequenceTooShort, fmt::format("training video {} is shorter than L = {}", v, L));
    const auto& gts = videos[v].ground_truth;
    for (const auto& gt : gts) windows.push_back({v, std::clamp(gt.center() - lead, 0, n - L), 1});
    for (int c = lead; c + trail < n; ++c) {
      const bool clear = std::all_of(gts.begin(), gts.end(),
                                     [&](const GroundTruthSample& gt) { return std::abs(c - gt.center()) >= L; });
      if (clear) pool.push_back({v, c - lead, -1});
    }
  }

  const std::size_t wanted = std::min(pool.size(), windows.size() * negatives_per_positive);
  SplitMix64 rng(seed);
  for (std::size_t i = 0; i < wanted; ++i) {
    const auto j = static_cast<std::size_t>(
        rng.uniform_int(static_cast<std::int64_t>(i), static_cast<std::int64_t>(pool.size() - 1)));
    std::swap(pool[i], pool[j]);
  }
  windows.insert(windows.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(wanted));
  std::stable_sort(windows.begin(), windows.end(), [](const TrainingWindow& a, const TrainingWindow& b) {
    return a.video != b.video ? a.video < b.video : a.start < b.start;
  });
  return windows;
}

TrainingSet build_training_set(std::span<const LabeledVideo> videos, const StFeatureConfig& cfg,
                               int negatives_per_positive, std::uint64_t seed) {
  cfg.validate();
  std::vector<VideoLayout> layouts;
  layouts.reserve(videos.size());
  for (const auto& v : videos) layouts.push_back({v.frames->frame_count(), v.ground_truth});

  TrainingSet set;
  for (const auto& w : plan_training_windows(layouts, cfg.window_length, negatives_per_positive, seed)) {
    set.samples.push_back(window_feature(*videos[w.video].frames, w.start, cfg.window_length, cfg));
    set.labels.push_back(w.label);
  }
  return set;
}

}  // namespace mespot
