#include "mespot/harness.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <exception>
#include <set>
#include <thread>

#include "mespot/error.hpp"
#include "mespot/frames.hpp"
#include "mespot/spotters.hpp"

namespace mespot {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::LbpChi2: return "lbp-chi2";
    case Method::Mdmd: return "mdmd";
    case Method::Landmark: return "landmark";
    case Method::LbpTopSvm: return "lbp-top-svm";
    case Method::HogTopSvm: return "hog-top-svm";
    case Method::HigoTopSvm: return "higo-top-svm";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  for (auto m : {Method::LbpChi2, Method::Mdmd, Method::Landmark, Method::LbpTopSvm, Method::HogTopSvm,
                 Method::HigoTopSvm}) {
    if (to_string(m) == name) return m;
  }
  fail(ErrorKind::Configuration, fmt::format("unknown method '{}'", name));
}

bool is_supervised(Method method) {
  return method == Method::LbpTopSvm || method == Method::HogTopSvm || method == Method::HigoTopSvm;
}

bool needs_frames(Method method) { return method != Method::Landmark; }

StFeatureConfig SpotterSpec::features() const {
  StFeatureConfig f = config.features;
  if (method == Method::LbpTopSvm) f.kind = StFeatureKind::LbpTop;
  if (method == Method::HogTopSvm) f.kind = StFeatureKind::HogTop;
  if (method == Method::HigoTopSvm) f.kind = StFeatureKind::HigoTop;
  return f;
}

std::vector<Detection> spot_video(const SpotterSpec& spec, const FrameSequence* frames, const LandmarkTrack* track,
                                  const LinearModel* model) {
  if (needs_frames(spec.method) && frames == nullptr) fail(ErrorKind::Argument, "spotter needs frames");
  switch (spec.method) {
    case Method::LbpChi2: return spot_lbp_chi2(*frames, spec.config.spotter);
    case Method::Mdmd: return spot_mdmd(*frames, spec.config.spotter);
    case Method::Landmark:
      if (track == nullptr) fail(ErrorKind::Coverage, "landmark spotter needs a landmark track");
      return spot_landmarks(*track, spec.config.spotter);
    default:
      if (model == nullptr) fail(ErrorKind::Argument, "supervised spotter needs a model");
      return spot_supervised(*frames, *model);
  }
}

TrainResult train_supervised(const DatasetManifest& manifest, const std::vector<std::string>& video_ids,
                             const SpotterSpec& spec, const FrameLoader& loader) {
  const StFeatureConfig features = spec.features();
  features.validate();
  std::vector<const VideoRecord*> records;
  std::vector<VideoLayout> layouts;
  for (const auto& id : video_ids) {
    const VideoRecord* rec = manifest.find_video(id);
    if (rec == nullptr) fail(ErrorKind::Reference, fmt::format("unknown video '{}'", id));
    records.push_back(rec);
    layouts.push_back({rec->frame_count, manifest.ground_truth_for(id)});
  }
  const auto plan = plan_training_windows(layouts, features.window_length, spec.config.negatives_per_positive,
                                          spec.config.seed);

  // plan is sorted by video, so each video is loaded once
  TrainingSet set;
  std::optional<FrameSequence> current;
  std::size_t loaded = records.size();
  for (const auto& w : plan) {
    if (w.video != loaded) {
      current = loader(*records[w.video]);
      loaded = w.video;
    }
    set.samples.push_back(window_feature(*current, w.start, features.window_length, features));
    set.labels.push_back(w.label);
  }
  return train_linear(set.samples, set.labels, spec.config.train, features);
}

std::vector<Detection> spot_videos(const DatasetManifest& manifest, const std::vector<std::string>& ids,
                                   const SpotterSpec& spec, const FrameLoader& loader, const LinearModel* model,
                                   int workers) {
  if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
  std::vector<std::vector<Detection>> per_video(ids.size());
  std::vector<std::exception_ptr> errors(ids.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < ids.size(); i = next++) {
      try {
        const VideoRecord* rec = manifest.find_video(ids[i]);
        if (rec == nullptr) fail(ErrorKind::Reference, fmt::format("unknown video '{}'", ids[i]));
        const LandmarkTrack* track = nullptr;
        if (spec.method == Method::Landmark) {
          const auto it = spec.landmarks.find(ids[i]);
          if (it == spec.landmarks.end()) fail(ErrorKind::Coverage, fmt::format("no landmarks for video '{}'", ids[i]));
          track = &it->second;
        }
        std::optional<FrameSequence> frames;
        if (needs_frames(spec.method)) frames = loader(*rec);
        per_video[i] = spot_video(spec, frames ? &*frames : nullptr, track, model);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int n_threads = std::min<int>(workers, static_cast<int>(ids.size()));
  if (n_threads <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(work);
  }
  // first failure in list order, independent of scheduling
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<Detection> dets;
  for (auto& v : per_video) dets.insert(dets.end(), v.begin(), v.end());
  return dets;
}

std::vector<FoldSplit> subject_groups(const DatasetManifest& manifest) {
  std::set<std::string> subjects;
  for (const auto& v : manifest.videos) subjects.insert(v.subject_id);
  std::vector<FoldSplit> folds;
  for (const auto& s : subjects) {
    FoldSplit f;
    f.test_subject = s;
    for (const auto& v : manifest.videos) {
      (v.subject_id == s ? f.test_videos : f.train_videos).push_back(v.video_id);
    }
    folds.push_back(std::move(f));
  }
  return folds;
}

std::vector<FoldSplit> loso_folds(const DatasetManifest& manifest) {
  auto folds = subject_groups(manifest);
  if (folds.size() < 2) {
    fail(ErrorKind::Configuration,
         fmt::format("leave-one-subject-out needs at least 2 subjects, manifest has {}", folds.size()));
  }
  return folds;
}

namespace {

std::vector<Detection> for_video(const std::vector<Detection>& dets, const std::string& id) {
  std::vector<Detection> out;
  for (const auto& d : dets) {
    if (d.video_id == id) out.push_back(d);
  }
  return out;
}

CriterionSummary summarize(const EvalCounts& counts, const std::vector<MatchedPair>& pairs, bool apex_mode) {
  CriterionSummary s;
  s.counts = counts;
  s.metrics = prf1(counts);
  if (!pairs.empty()) s.frame_f = frame_accuracy(pairs, apex_mode);
  return s;
}

}  // namespace

BenchmarkReport evaluate_detections(const DatasetManifest& manifest, const std::vector<FoldSplit>& folds,
                                    const std::vector<std::vector<Detection>>& fold_detections,
                                    const ToolkitConfig& config, std::string method) {
  if (folds.size() != fold_detections.size()) fail(ErrorKind::Argument, "one detection list per fold expected");
  config.eval.validate();
  EvalConfig center_cfg = config.eval;
  center_cfg.criterion = Criterion::Center;
  EvalConfig iou_cfg = config.eval;
  iou_cfg.criterion = Criterion::Iou;

  BenchmarkReport report;
  report.method = std::move(method);
  report.config_text = to_text(config);
  report.stats = manifest.stats;
  report.det_criterion = config.eval.criterion;

  EvalCounts center_total;
  EvalCounts iou_total;
  std::vector<MatchedPair> center_pairs;
  std::vector<MatchedPair> iou_pairs;
  std::vector<ScoredRun> runs;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    FoldResult fr;
    fr.test_subject = folds[f].test_subject;
    fr.detections = fold_detections[f];
    ScoredRun run;
    for (const auto& id : folds[f].test_videos) {
      const auto gts = manifest.ground_truth_for(id);
      const auto dets = for_video(fr.detections, id);
      const auto c = match(gts, dets, center_cfg);
      const auto i = match(gts, dets, iou_cfg);
      fr.center += c.counts();
      fr.iou += i.counts();
      center_pairs.insert(center_pairs.end(), c.pairs.begin(), c.pairs.end());
      iou_pairs.insert(iou_pairs.end(), i.pairs.begin(), i.pairs.end());
      run.gts.insert(run.gts.end(), gts.begin(), gts.end());
      run.dets.insert(run.dets.end(), dets.begin(), dets.end());
    }
    center_total += fr.center;
    iou_total += fr.iou;
    runs.push_back(std::move(run));
    report.folds.push_back(std::move(fr));
  }
  report.center = summarize(center_total, center_pairs, config.eval.apex_mode);
  report.iou = summarize(iou_total, iou_pairs, config.eval.apex_mode);
  report.det = det_points(runs, manifest.stats, config.eval);
  return report;
}

BenchmarkReport run_benchmark(const DatasetManifest& manifest, const SpotterSpec& spec, const FrameLoader& loader,
                              const RunOptions& options) {
  spec.config.spotter.validate();
  spec.config.eval.validate();
  const auto folds = options.folds ? *options.folds : loso_folds(manifest);

  std::vector<std::vector<Detection>> fold_detections;
  for (const auto& fold : folds) {
    try {
      std::optional<LinearModel> model;
      if (is_supervised(spec.method)) model = train_supervised(manifest, fold.train_videos, spec, loader).model;

      auto dets = spot_videos(manifest, fold.test_videos, spec, loader, model ? &*model : nullptr, options.workers);
      fold_detections.push_back(std::move(dets));
    } catch (const Error& e) {
      fail(e.kind(), fmt::format("fold '{}' failed: {}", fold.test_subject, e.detail()));
    }
  }
  return evaluate_detections(manifest, folds, fold_detections, spec.config, std::string(to_string(spec.method)));
}

BenchmarkReport run_benchmark(const DatasetManifest& manifest, const SpotterSpec& spec,
                              const std::filesystem::path& base_dir, const RunOptions& options) {
  if (needs_frames(spec.method)) {
    for (const auto& v : manifest.videos) {
      const auto path = resolve_frames_path(v, base_dir);
      if (!std::filesystem::exists(path)) {
        fail(ErrorKind::Io, fmt::format("frames for video '{}' not found at {}", v.video_id, path.string()));
      }
    }
  }
  return run_benchmark(manifest, spec, [&](const VideoRecord& rec) { return load_frames(rec, base_dir); }, options);
}

}  // namespace mespot
