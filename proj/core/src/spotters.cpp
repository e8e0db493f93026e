#include "mespot/spotters.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mespot/error.hpp"
#include "mespot/landmarks.hpp"
#include "mespot/lbp.hpp"

namespace mespot {

void SpotterConfig::validate() const {
  auto bad = [](const std::string& msg) { fail(ErrorKind::Configuration, msg); };
  if (window_length < 3) bad("window length L must be >= 3");
  if (half_window < 1 || half_window > window_length) bad("half window h must lie in [1, L]");
  if (lbp_grid < 1) bad("LBP grid must be >= 1");
  if (lbp_neighbors != 8 || lbp_radius != 1) bad("only 8-neighbour, radius-1 LBP is supported");
  if (!(peak_fraction >= 0.0 && peak_fraction <= 1.0)) bad("peak fraction p must lie in [0, 1]");
  if (mdmd_offset < 0) bad("MDMD offset k must be >= 0");
  if (mdmd_bins < 1) bad("MDMD bins must be >= 1");
  if (mdmd_search_radius < 0) bad("MDMD search radius must be >= 0");
  if (landmark_window < 0 || landmark_window == 1 || landmark_window == 2) bad("landmark window must be 0 or >= 3");
}

ScoreCurve chi2_contrast_curve(const FrameSequence& seq, const SpotterConfig& cfg) {
  cfg.validate();
  seq.validate();
  const int n = seq.frame_count();
  const int L = cfg.window_length;
  if (n <= L) {
    fail(ErrorKind::SequenceTooShort, fmt::format("video {} has {} frames; need more than L = {}",
                                                  seq.video_id, n, L));
  }
  std::vector<std::vector<double>> hists;
  hists.reserve(n);
  for (const auto& f : seq.frames) hists.push_back(lbp_block_histograms(f, cfg.lbp_grid));

  const int lead = L / 2;
  const int trail = L - 1 - lead;
  ScoreCurve curve{seq.video_id, std::vector<double>(n, 0.0)};
  std::vector<double> reference(hists.front().size());
  for (int i = lead; i + trail < n; ++i) {
    const auto& head = hists[i - lead];
    const auto& tail = hists[i + trail];
    for (std::size_t b = 0; b < reference.size(); ++b) reference[b] = 0.5 * (head[b] + tail[b]);
    curve.values[i] = chi2_distance(hists[i], reference);
  }
  return curve;
}

std::vector<Peak> threshold_peaks(const ScoreCurve& curve, const SpotterConfig& cfg) {
  cfg.validate();
  const auto& v = curve.values;
  if (v.empty()) return {};
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  const double max = *std::max_element(v.begin(), v.end());
  const double threshold = mean + cfg.peak_fraction * (max - mean);
  const int radius = cfg.window_length / 2;
  const int n = static_cast<int>(v.size());

  std::vector<Peak> peaks;
  for (int i = 0; i < n; ++i) {
    if (!(v[i] > threshold)) continue;
    bool dominant = true;
    for (int j = std::max(0, i - radius); j <= std::min(n - 1, i + radius) && dominant; ++j) {
      if (j < i) dominant = v[j] < v[i];
      if (j > i) dominant = v[j] <= v[i];
    }
    if (dominant) peaks.push_back({i, v[i]});
  }
  return peaks;
}

std::vector<Detection> nms(std::span<const Detection> dets, int spacing) {
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (dets[a].score != dets[b].score) return dets[a].score > dets[b].score;
    return dets[a].center < dets[b].center;
  });
  std::vector<Detection> kept;
  for (const std::size_t i : order) {
    const bool clear = std::all_of(kept.begin(), kept.end(), [&](const Detection& k) {
      return std::abs(static_cast<long long>(k.center) - dets[i].center) >= spacing;
    });
    if (clear) kept.push_back(dets[i]);
  }
  std::stable_sort(kept.begin(), kept.end(),
                   [](const Detection& a, const Detection& b) { return a.center < b.center; });
  return kept;
}

std::vector<Detection> peaks_to_detections(const std::string& video_id, std::span<const Peak> peaks,
                                           const SpotterConfig& cfg) {
  std::vector<Detection> dets;
  dets.reserve(peaks.size());
  for (const auto& p : peaks) dets.push_back({video_id, p.frame, cfg.window_length, p.score});
  return cfg.apply_nms ? nms(dets, cfg.window_length) : dets;
}

std::vector<Detection> spot_lbp_chi2(const FrameSequence& seq, const SpotterConfig& cfg) {
  const ScoreCurve curve = chi2_contrast_curve(seq, cfg);
  const auto peaks = threshold_peaks(curve, cfg);
  return peaks_to_detections(seq.video_id, peaks, cfg);
}

// --- landmarks ---------------------------------------------------------------

std::array<double, kLandmarkRatioCount> landmark_distances(std::span<const Point2> p) {
  if (p.size() < static_cast<std::size_t>(LandmarkTrack::kDefaultPointCount)) {
    fail(ErrorKind::Coverage, fmt::format("landmark ratios need 68 points, got {}", p.size()));
  }
  auto dist = [&](int a, int b) { return std::hypot(p[a].x - p[b].x, p[a].y - p[b].y); };
  using namespace landmark68;
  return {dist(kRightBrowMid, kRightEyeUpper), dist(kLeftBrowMid, kLeftEyeUpper),
          dist(kRightEyeUpper, kRightEyeLower), dist(kLeftEyeUpper, kLeftEyeLower),
          dist(kMouthLeft, kMouthRight),       dist(kMouthTop, kMouthBottom)};
}

ScoreCurve landmark_curve(const LandmarkTrack& track, const SpotterConfig& cfg) {
  cfg.validate();
  const int n = static_cast<int>(track.frames.size());
  if (n == 0 || !track.is_dense(n)) {
    fail(ErrorKind::Coverage, "landmark spotting needs one landmark entry for every frame of " + track.video_id);
  }
  const int window = cfg.effective_landmark_window();
  if (n <= window) {
    fail(ErrorKind::SequenceTooShort,
         fmt::format("track {} has {} frames; need more than {}", track.video_id, n, window));
  }
  std::vector<std::array<double, kLandmarkRatioCount>> dist;
  dist.reserve(n);
  for (const auto& f : track.frames) dist.push_back(landmark_distances(f.points));

  const int lead = window / 2;
  const int trail = window - 1 - lead;
  ScoreCurve curve{track.video_id, std::vector<double>(n, 0.0)};
  for (int i = lead; i + trail < n; ++i) {
    const auto& ref = dist[i - lead];
    double sq = 0.0;
    for (int k = 0; k < kLandmarkRatioCount; ++k) {
      if (!(ref[k] > 1e-9)) {
        fail(ErrorKind::Geometry,
             fmt::format("degenerate reference distance in {} at frame {}", track.video_id, i - lead));
      }
      const double dev = dist[i][k] / ref[k] - 1.0;
      sq += dev * dev;
    }
    curve.values[i] = std::sqrt(sq);
  }
  return curve;
}

std::vector<Detection> spot_landmarks(const LandmarkTrack& track, const SpotterConfig& cfg) {
  const ScoreCurve curve = landmark_curve(track, cfg);
  const auto peaks = threshold_peaks(curve, cfg);
  return peaks_to_detections(track.video_id, peaks, cfg);
}

// --- per-frame feature post-processing -----------------------------------------

std::vector<double> difference_energy(const FeatureMatrix& f) {
  if (f.rows < 1 || f.cols < 1 || f.data.size() != static_cast<std::size_t>(f.rows) * f.cols) {
    fail(ErrorKind::Argument, "feature matrix shape does not match its data");
  }
  std::vector<double> energy(f.rows, 0.0);
  for (int i = 0; i < f.rows; ++i) {
    double s = 0.0;
    for (int j = 0; j < f.cols; ++j) {
      const double d = f.at(i, j) - f.at(0, j);
      s += d * d;
    }
    energy[i] = s;
  }
  return energy;
}

std::vector<double> windowed_sums(std::span<const double> energy, int h) {
  const int x = static_cast<int>(energy.size());
  if (h < 1 || x <= 2 * h) {
    fail(ErrorKind::Argument, fmt::format("need more than 2h = {} frames, got {}", 2 * h, x));
  }
  std::vector<double> sums(x, 0.0);
  for (int i = h; i <= x - h; ++i) {
    double s = 0.0;
    for (int m = i - h; m <= i + h - 1; ++m) s += energy[m];
    sums[i] = s;
  }
  return sums;
}

ApexResult feature_engineering_apex(const FeatureMatrix& features, int h) {
  const auto energy = difference_energy(features);
  const auto sums = windowed_sums(energy, h);
  ApexResult best{h, sums[h]};
  for (int i = h + 1; i <= features.rows - h; ++i) {
    if (sums[i] > best.score) best = {i, sums[i]};
  }
  return best;
}

}  // namespace mespot
