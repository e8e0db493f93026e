#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mespot/config.hpp"
#include "mespot/metrics.hpp"
#include "mespot/stfeatures.hpp"
#include "mespot/types.hpp"

namespace mespot {

inline constexpr std::string_view kToolkitVersion = "mespot 1.0.0";

enum class Method { LbpChi2, Mdmd, Landmark, LbpTopSvm, HogTopSvm, HigoTopSvm };

std::string_view to_string(Method method);
Method parse_method(std::string_view name);
bool is_supervised(Method method);
bool needs_frames(Method method);

struct SpotterSpec {
  Method method = Method::LbpChi2;
  ToolkitConfig config;
  std::map<std::string, LandmarkTrack> landmarks;  // landmark method only

  /// Feature config with the kind implied by a supervised method.
  StFeatureConfig features() const;
};

/// Runs one unsupervised or supervised spotter on one video. `model` is
/// required for supervised methods, `track` for the landmark method.
std::vector<Detection> spot_video(const SpotterSpec& spec, const FrameSequence* frames,
                                  const LandmarkTrack* track = nullptr, const LinearModel* model = nullptr);

using FrameLoader = std::function<FrameSequence(const VideoRecord&)>;

/// Trains a linear model on the listed videos. Windows are planned from
/// the manifest first, then each video is loaded once.
TrainResult train_supervised(const DatasetManifest& manifest, const std::vector<std::string>& video_ids,
                             const SpotterSpec& spec, const FrameLoader& loader);

/// Spots the listed videos on up to `workers` threads (0: machine
/// parallelism). Output is in list order whatever the schedule.
std::vector<Detection> spot_videos(const DatasetManifest& manifest, const std::vector<std::string>& video_ids,
                                   const SpotterSpec& spec, const FrameLoader& loader,
                                   const LinearModel* model = nullptr, int workers = 0);

struct FoldSplit {
  std::string test_subject;
  std::vector<std::string> train_videos;
  std::vector<std::string> test_videos;
};

/// One group per subject ordered by subject id; no minimum.
std::vector<FoldSplit> subject_groups(const DatasetManifest& manifest);

/// Throws ErrorKind::Configuration for fewer than two subjects.
std::vector<FoldSplit> loso_folds(const DatasetManifest& manifest);

struct FoldResult {
  std::string test_subject;
  EvalCounts center;
  EvalCounts iou;
  std::vector<Detection> detections;
};

struct CriterionSummary {
  EvalCounts counts;
  Prf1 metrics;
  std::optional<double> frame_f;  // empty without true positives
};

struct BenchmarkReport {
  std::string version{kToolkitVersion};
  std::string method;
  std::string config_text;
  DatasetStats stats;
  std::vector<FoldResult> folds;
  CriterionSummary center;
  CriterionSummary iou;
  Criterion det_criterion = Criterion::Center;
  std::vector<DetPoint> det;
};

/// Scores detections already produced for each fold's test videos.
BenchmarkReport evaluate_detections(const DatasetManifest& manifest, const std::vector<FoldSplit>& folds,
                                    const std::vector<std::vector<Detection>>& fold_detections,
                                    const ToolkitConfig& config, std::string method);

struct RunOptions {
  int workers = 0;  // 0 selects the machine's parallelism
  std::optional<std::vector<FoldSplit>> folds;  // default: loso_folds
};

BenchmarkReport run_benchmark(const DatasetManifest& manifest, const SpotterSpec& spec, const FrameLoader& loader,
                              const RunOptions& options = {});

/// Frames are read relative to `base_dir`; every video's storage is checked
/// before any fold runs.
BenchmarkReport run_benchmark(const DatasetManifest& manifest, const SpotterSpec& spec,
                              const std::filesystem::path& base_dir, const RunOptions& options = {});

}  // namespace mespot
