#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mespot/types.hpp"

namespace mespot {

enum class StFeatureKind { LbpTop, HogTop, HigoTop };

std::string_view to_string(StFeatureKind kind);
StFeatureKind parse_st_feature_kind(std::string_view name);

struct StFeatureConfig {
  StFeatureKind kind = StFeatureKind::HigoTop;
  int blocks_x = 8;
  int blocks_y = 8;
  int blocks_t = 4;
  double overlap = 0.2;  // fraction of a block shared with its neighbour, per axis
  int bins = 8;          // orientation bins (HOG/HIGO); LBP-TOP always uses 59
  int window_length = 35;
  std::vector<double> scales{1.0, 0.75, 0.5};

  int bins_per_plane() const;
  std::size_t feature_length() const;

  /// Throws ErrorKind::Configuration.
  void validate() const;
};

/// Block extents along one axis: `parts` blocks of equal size s that overlap
/// by `overlap * s`, together spanning [0, n). Half-open [begin, end) pairs.
std::vector<std::array<int, 2>> overlapping_blocks(int n, int parts, double overlap);

/// Histogram descriptor of a T x H x W volume over three orthogonal planes
/// (XY, XT, YT). Output is block-major (t, y, x) and plane-minor, every
/// histogram L1-normalised. Zero-gradient voxels vote into no bin, so a
/// constant volume yields all-zero HOG/HIGO histograms.
std::vector<double> extract_st_feature(std::span<const Raster> volume, const StFeatureConfig& cfg);

// --- linear classifier --------------------------------------------------------

inline constexpr std::string_view kLinearModelMagic = "MESPOT-LINEAR v1";

struct LinearModel {
  StFeatureConfig features;
  std::vector<double> weights;
  double bias = 0.0;

  double decision(std::span<const double> x) const;
};

struct TrainConfig {
  double lambda = 1e-4;
  int epochs = 200;
  double initial_step = 1.0;
  bool balance_classes = true;
  bool standardize = true;  // z-score every dimension; folded back into the stored weights
};

struct TrainResult {
  LinearModel model;
  std::vector<double> loss_trace;  // objective after each epoch, non-increasing
};

/// Hinge loss with L2 regularisation, minimised by full-batch subgradient
/// descent with step halving: an epoch only commits a step that does not
/// increase the objective. Fully deterministic. Labels are +1 / -1.
/// With `standardize` the objective is taken over z-scored features (mean
/// and spread of the training set) and the returned model is mapped back to
/// raw features, so `decision` needs no preprocessing.
/// Throws ErrorKind::Training for an empty class or an identical vector
/// carrying both labels, ErrorKind::Argument for ragged input.
TrainResult train_linear(std::span<const std::vector<double>> samples, std::span<const int> labels,
                         const TrainConfig& cfg, const StFeatureConfig& features);

double hinge_objective(const LinearModel& model, std::span<const std::vector<double>> samples,
                       std::span<const int> labels, const TrainConfig& cfg);

std::string write_linear_model_text(const LinearModel& model);
LinearModel parse_linear_model_text(std::string_view text);
void write_linear_model(const LinearModel& model, const std::filesystem::path& path);
LinearModel read_linear_model(const std::filesystem::path& path);

// --- sliding-window supervised spotting --------------------------------------

/// Nearest-frame resampling of frames [start, start + length) to `target`
/// frames.
std::vector<int> resample_indices(int start, int length, int target);

/// Multi-scale sliding window: window L_s = round(L * s), stride ceil(L_s / 4),
/// each window resampled to L frames and scored by the model. Positive scores
/// become detections of length L_s; NMS with spacing L merges all scales.
std::vector<Detection> spot_supervised(const FrameSequence& seq, const LinearModel& model);

struct LabeledVideo {
  const FrameSequence* frames = nullptr;
  std::vector<GroundTruthSample> ground_truth;
};

/// Frame count and ground truth of one training video; enough to plan windows.
struct VideoLayout {
  int frame_count = 0;
  std::vector<GroundTruthSample> ground_truth;
};

struct TrainingWindow {
  std::size_t video = 0;  // index into the layouts passed to the planner
  int start = 0;          // first frame of an L-frame window
  int label = 1;
};

/// Positives: one L-frame window centred on each ground-truth sample (shifted
/// inward at the sequence ends). Negatives: windows whose centre is >= L
/// frames from every ground-truth centre of its video, `negatives_per_positive`
/// per positive, drawn without replacement by the seeded generator. Output is
/// sorted by (video, start).
std::vector<TrainingWindow> plan_training_windows(std::span<const VideoLayout> videos, int window_length,
                                                  int negatives_per_positive, std::uint64_t seed);

/// Feature of the `length`-frame window starting at `start`, resampled to L.
std::vector<double> window_feature(const FrameSequence& seq, int start, int length, const StFeatureConfig& cfg);

struct TrainingSet {
  std::vector<std::vector<double>> samples;
  std::vector<int> labels;
};

TrainingSet build_training_set(std::span<const LabeledVideo> videos, const StFeatureConfig& cfg,
                               int negatives_per_positive, std::uint64_t seed);

}  // namespace mespot
