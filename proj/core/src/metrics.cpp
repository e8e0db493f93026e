#include "mespot/metrics.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <numeric>
#include <tuple>

#include "mespot/error.hpp"

namespace mespot {

std::string_view to_string(Criterion c) { return c == Criterion::Center ? "center" : "iou"; }

Criterion parse_criterion(std::string_view name) {
  if (name == "center") return Criterion::Center;
  if (name == "iou") return Criterion::Iou;
  fail(ErrorKind::Configuration, fmt::format("unknown criterion '{}' (expected center or iou)", name));
}

void EvalConfig::validate() const {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) {
    fail(ErrorKind::Configuration, fmt::format("epsilon {} outside (0, 1]", epsilon));
  }
}

double iou(const Interval& a, const Interval& b) {
  if (a.offset < a.onset || b.offset < b.onset) fail(ErrorKind::Argument, "invalid interval in iou");
  const long long inter =
      std::max(0LL, static_cast<long long>(std::min(a.offset, b.offset)) - std::max(a.onset, b.onset) + 1);
  const long long uni = static_cast<long long>(a.length()) + b.length() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

bool center_hit(const GroundTruthSample& gt, const Detection& det) {
  // 2|dC| <= L_gt keeps the comparison in integers.
  return 2LL * std::llabs(static_cast<long long>(det.center) - gt.center()) <= gt.length();
}

namespace {

struct Candidate {
  double key;  // lower is better
  std::size_t gt;
  std::size_t det;
};

bool gt_less(const GroundTruthSample& a, const GroundTruthSample& b) {
  return std::tie(a.onset, a.offset, a.video_id) < std::tie(b.onset, b.offset, b.video_id);
}

bool det_less(const Detection& a, const Detection& b) {
  return std::tuple(a.center, a.length, -a.score, a.video_id) <
         std::tuple(b.center, b.length, -b.score, b.video_id);
}

}  // namespace

MatchResult match(std::span<const GroundTruthSample> gts, std::span<const Detection> dets,
                  const EvalConfig& cfg) {
  cfg.validate();
  for (const auto& g : gts) {
    if (g.offset < g.onset) fail(ErrorKind::Argument, "ground truth offset precedes onset");
  }
  for (const auto& d : dets) {
    if (d.length < 1) fail(ErrorKind::Argument, "detection length must be >= 1");
    if (!std::isfinite(d.score)) fail(ErrorKind::Argument, "detection score must be finite");
  }

  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < gts.size(); ++i) {
    for (std::size_t j = 0; j < dets.size(); ++j) {
      if (cfg.criterion == Criterion::Center) {
        if (center_hit(gts[i], dets[j])) {
          candidates.push_back({std::abs(static_cast<double>(dets[j].center) - gts[i].center()), i, j});
        }
      } else {
        const double v = iou(gts[i].interval(), dets[j].interval());
        if (v >= cfg.epsilon) candidates.push_back({-v, i, j});
      }
    }
  }
  std::sort(candidates.begin(), candidates.end(), [&](const Candidate& a, const Candidate& b) {
    if (a.key != b.key) return a.key < b.key;
    const Detection& da = dets[a.det];
    const Detection& db = dets[b.det];
    if (det_less(da, db) || det_less(db, da)) return det_less(da, db);
    const GroundTruthSample& ga = gts[a.gt];
    const GroundTruthSample& gb = gts[b.gt];
    if (gt_less(ga, gb) || gt_less(gb, ga)) return gt_less(ga, gb);
    return std::tie(a.gt, a.det) < std::tie(b.gt, b.det);
  });

  std::vector<char> gt_used(gts.size(), 0), det_used(dets.size(), 0);
  MatchResult result;
  for (const auto& c : candidates) {
    if (gt_used[c.gt] || det_used[c.det]) continue;
    gt_used[c.gt] = det_used[c.det] = 1;
    result.pairs.push_back({gts[c.gt], dets[c.det]});
  }
  for (std::size_t i = 0; i < gts.size(); ++i) {
    if (!gt_used[i]) result.unmatched_gt.push_back(gts[i]);
  }
  for (std::size_t j = 0; j < dets.size(); ++j) {
    if (!det_used[j]) result.unmatched_det.push_back(dets[j]);
  }
  std::sort(result.pairs.begin(), result.pairs.end(), [](const MatchedPair& a, const MatchedPair& b) {
    if (gt_less(a.gt, b.gt) || gt_less(b.gt, a.gt)) return gt_less(a.gt, b.gt);
    return det_less(a.det, b.det);
  });
  std::sort(result.unmatched_gt.begin(), result.unmatched_gt.end(), gt_less);
  std::sort(result.unmatched_det.begin(), result.unmatched_det.end(), det_less);
  return result;
}

MatchResult match_by_video(std::span<const GroundTruthSample> gts, std::span<const Detection> dets,
                           const EvalConfig& cfg) {
  std::map<std::string, std::pair<std::vector<GroundTruthSample>, std::vector<Detection>>> by_video;
  for (const auto& g : gts) by_video[g.video_id].first.push_back(g);
  for (const auto& d : dets) by_video[d.video_id].second.push_back(d);

  MatchResult all;
  for (const auto& [video, items] : by_video) {
    MatchResult r = match(items.first, items.second, cfg);
    std::move(r.pairs.begin(), r.pairs.end(), std::back_inserter(all.pairs));
    std::move(r.unmatched_gt.begin(), r.unmatched_gt.end(), std::back_inserter(all.unmatched_gt));
    std::move(r.unmatched_det.begin(), r.unmatched_det.end(), std::back_inserter(all.unmatched_det));
  }
  if (by_video.empty()) cfg.validate();
  return all;
}

Prf1 prf1(const EvalCounts& c) {
  Prf1 r;
  const double tp = static_cast<double>(c.tp);
  if (c.tp + c.fp > 0) r.precision = tp / static_cast<double>(c.tp + c.fp);
  if (c.tp + c.fn > 0) r.recall = tp / static_cast<double>(c.tp + c.fn);
  if (r.precision + r.recall > 0.0) r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
  return r;
}

double frame_accuracy(std::span<const MatchedPair> pairs, bool apex_mode) {
  if (pairs.empty()) {
    fail(ErrorKind::UndefinedMetric, "frame-based accuracy needs at least one true positive");
  }
  double sum = 0.0;
  for (const auto& p : pairs) {
    const double dc = std::abs(static_cast<double>(p.det.center) - p.gt.center());
    const double lgt = p.gt.length();
    if (apex_mode) {
      sum += dc / lgt;
    } else {
      const double dl = std::abs(static_cast<double>(p.det.length) - lgt);
      sum += (dc + dl) / (2.0 * lgt);
    }
  }
  return sum / static_cast<double>(pairs.size());
}

std::vector<double> default_thresholds(std::span<const ScoredRun> runs) {
  std::vector<double> scores;
  for (const auto& r : runs) {
    for (const auto& d : r.dets) scores.push_back(d.score);
  }
  std::sort(scores.begin(), scores.end(), std::greater<>());
  scores.erase(std::unique(scores.begin(), scores.end()), scores.end());
  scores.insert(scores.begin(), std::numeric_limits<double>::infinity());
  return scores;
}

std::vector<DetPoint> det_points(std::span<const ScoredRun> runs, const DatasetStats& stats,
                                 const EvalConfig& cfg, std::optional<std::vector<double>> thresholds) {
  if (stats.videos <= 0) fail(ErrorKind::Configuration, "DET needs V > 0 videos");
  if (stats.samples <= 0) fail(ErrorKind::Configuration, "DET needs N+ > 0 ground-truth samples");
  cfg.validate();

  const std::vector<double> ts = thresholds ? std::move(*thresholds) : default_thresholds(runs);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (std::isnan(ts[i])) fail(ErrorKind::Argument, "NaN DET threshold");
    if (i > 0 && !(ts[i] < ts[i - 1])) {
      fail(ErrorKind::Argument, "DET thresholds must be strictly descending");
    }
  }

  std::vector<DetPoint> points;
  points.reserve(ts.size());
  for (const double t : ts) {
    EvalCounts total;
    for (const auto& run : runs) {
      std::vector<Detection> kept;
      for (const auto& d : run.dets) {
        if (d.score >= t) kept.push_back(d);
      }
      total += match_by_video(run.gts, kept, cfg).counts();
    }
    points.push_back({t, static_cast<double>(total.fp) / stats.videos,
                      1.0 - static_cast<double>(total.tp) / stats.samples});
  }
  return points;
}

}  // namespace mespot
