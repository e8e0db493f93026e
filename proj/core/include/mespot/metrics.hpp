#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mespot/types.hpp"

namespace mespot {

enum class Criterion { Center, Iou };

std::string_view to_string(Criterion c);
Criterion parse_criterion(std::string_view name);

struct EvalConfig {
  double epsilon = 0.5;
  Criterion criterion = Criterion::Center;
  bool apex_mode = false;

  /// Throws ErrorKind::Configuration unless 0 < epsilon <= 1.
  void validate() const;
};

/// Frame-count intersection over union of two inclusive intervals.
double iou(const Interval& a, const Interval& b);

/// Hit rule of the center criterion: |C_w - C_gt| <= 0.5 * L_gt.
bool center_hit(const GroundTruthSample& gt, const Detection& det);

struct MatchedPair {
  GroundTruthSample gt;
  Detection det;
};

struct EvalCounts {
  long long tp = 0;
  long long fp = 0;
  long long fn = 0;

  EvalCounts& operator+=(const EvalCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  friend EvalCounts operator+(EvalCounts a, const EvalCounts& b) { return a += b; }
  friend bool operator==(const EvalCounts&, const EvalCounts&) = default;
};

struct MatchResult {
  std::vector<MatchedPair> pairs;
  std::vector<GroundTruthSample> unmatched_gt;  // Miss
  std::vector<Detection> unmatched_det;         // False

  EvalCounts counts() const {
    return {static_cast<long long>(pairs.size()), static_cast<long long>(unmatched_det.size()),
            static_cast<long long>(unmatched_gt.size())};
  }
};

/// Greedy one-to-one matching of the ground truth and detections of a single
/// video. Candidate pairs are accepted best-first (smallest center distance,
/// or largest IoU), ties broken by lower detection center, then lower gt
/// onset. Outputs are in canonical order regardless of input order.
MatchResult match(std::span<const GroundTruthSample> gts, std::span<const Detection> dets,
                  const EvalConfig& cfg);

/// Runs `match` per video and concatenates the results.
MatchResult match_by_video(std::span<const GroundTruthSample> gts, std::span<const Detection> dets,
                           const EvalConfig& cfg);

struct Prf1 {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Zero denominators give 0 for the affected value.
Prf1 prf1(const EvalCounts& counts);

/// Mean normalized deviation over true-positive pairs; 0 is a perfect match.
/// Interval mode: (|dC| + |dL|) / (2 L_gt). Apex mode: |dC| / L_gt.
/// Throws ErrorKind::UndefinedMetric on an empty pair list.
double frame_accuracy(std::span<const MatchedPair> pairs, bool apex_mode);

struct DetPoint {
  double threshold = 0.0;
  double fppv = 0.0;
  double miss_rate = 1.0;
};

/// Ground truth and scored detections of one LOSO fold (any number of videos).
struct ScoredRun {
  std::vector<GroundTruthSample> gts;
  std::vector<Detection> dets;
};

/// +infinity followed by the distinct detection scores in descending order.
std::vector<double> default_thresholds(std::span<const ScoredRun> runs);

/// One DET point per threshold t: detections with score >= t are matched per
/// video; FPPV = sum(FP) / V and miss rate = 1 - sum(TP) / N+.
std::vector<DetPoint> det_points(std::span<const ScoredRun> runs, const DatasetStats& stats,
                                 const EvalConfig& cfg,
                                 std::optional<std::vector<double>> thresholds = std::nullopt);

}  // namespace mespot
