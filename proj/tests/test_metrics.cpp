#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "mespot/error.hpp"
#include "mespot/metrics.hpp"
#include "oracles.hpp"
#include "support.hpp"

namespace mespot {
namespace {

using testing::det;
using testing::gt;

EvalConfig center_cfg() { return {}; }
EvalConfig iou_cfg(double eps = 0.5) { return {eps, Criterion::Iou, false}; }

TEST(Iou, KnownValues) {
  EXPECT_DOUBLE_EQ(iou({0, 10}, {20, 30}), 0.0);
  EXPECT_DOUBLE_EQ(iou({100, 134}, {118, 152}), 17.0 / 53.0);
  EXPECT_DOUBLE_EQ(iou({5, 9}, {5, 9}), 1.0);
}

TEST(Iou, MatchesEnumerationOracle) {
  SplitMix64 rng(11);
  for (int i = 0; i < 2000; ++i) {
    const int a0 = static_cast<int>(rng.uniform_int(0, 60)), b0 = static_cast<int>(rng.uniform_int(0, 60));
    const Interval a{a0, a0 + static_cast<int>(rng.uniform_int(0, 40))};
    const Interval b{b0, b0 + static_cast<int>(rng.uniform_int(0, 40))};
    EXPECT_DOUBLE_EQ(iou(a, b), oracle::iou_by_enumeration(a, b));
    EXPECT_DOUBLE_EQ(iou(a, b), iou(b, a));
  }
}

TEST(CenterHit, BoundaryOfHalfLength) {
  // C_gt = 100, L_gt = 20
  const auto g = gt("v", 90, 109);
  ASSERT_EQ(g.center(), 99);
  const auto g2 = gt("v", 91, 110);
  ASSERT_EQ(g2.center(), 100);
  EXPECT_TRUE(center_hit(g2, det("v", 109, 35)));
  EXPECT_TRUE(center_hit(g2, det("v", 110, 35)));
  EXPECT_FALSE(center_hit(g2, det("v", 111, 35)));
  EXPECT_TRUE(center_hit(g2, det("v", 90, 35)));
  EXPECT_FALSE(center_hit(g2, det("v", 89, 35)));
}

TEST(Match, SingleHitMissAndEmpty) {
  const std::vector<GroundTruthSample> gts{gt("v", 91, 110)};  // C 100, L 20
  auto r = match(gts, std::vector<Detection>{det("v", 109, 35)}, center_cfg());
  EXPECT_EQ(r.counts(), (EvalCounts{1, 0, 0}));
  r = match(gts, std::vector<Detection>{det("v", 111, 35)}, center_cfg());
  EXPECT_EQ(r.counts(), (EvalCounts{0, 1, 1}));
  r = match(gts, std::vector<Detection>{}, center_cfg());
  EXPECT_EQ(r.counts(), (EvalCounts{0, 0, 1}));
  ASSERT_EQ(r.unmatched_gt.size(), 1u);
  EXPECT_EQ(r.unmatched_gt[0], gts[0]);
}

TEST(Match, OneToOneNearestWins) {
  const std::vector<GroundTruthSample> gts{gt("v", 80, 120)};  // C 100
  const std::vector<Detection> dets{det("v", 110, 35), det("v", 97, 35), det("v", 103, 35)};
  const auto r = match(gts, dets, center_cfg());
  ASSERT_EQ(r.pairs.size(), 1u);
  EXPECT_EQ(r.pairs[0].det.center, 97);  // distance 3 tie with 103, lower centre wins
  EXPECT_EQ(r.counts(), (EvalCounts{1, 2, 0}));
}

TEST(Match, ShortSampleRejectedByIouAcceptedByCenter) {
  for (int len = 11; len <= 17; ++len) {
    const auto g = gt("v", 100, 100 + len - 1);
    const std::vector<GroundTruthSample> gts{g};
    const std::vector<Detection> dets{det("v", g.center(), 35)};
    EXPECT_EQ(match(gts, dets, iou_cfg()).counts().tp, 0) << len;
    EXPECT_EQ(match(gts, dets, center_cfg()).counts().tp, 1) << len;
  }
}

TEST(Match, CountsAreOrderIndependentAndConsistent) {
  SplitMix64 rng(5);
  for (int i = 0; i < 300; ++i) {
    auto inst = oracle::random_instance(rng, 6, 2);
    for (const auto& cfg : {center_cfg(), iou_cfg()}) {
      const auto base = match(inst.gts, inst.dets, cfg);
      const auto c = base.counts();
      EXPECT_EQ(c.tp + c.fn, static_cast<long long>(inst.gts.size()));
      EXPECT_EQ(c.tp + c.fp, static_cast<long long>(inst.dets.size()));
      auto gts = inst.gts;
      auto dets = inst.dets;
      std::reverse(gts.begin(), gts.end());
      std::rotate(dets.begin(), dets.begin() + dets.size() / 2, dets.end());
      const auto permuted = match(gts, dets, cfg);
      EXPECT_EQ(permuted.counts(), c);
      ASSERT_EQ(permuted.pairs.size(), base.pairs.size());
      for (std::size_t k = 0; k < base.pairs.size(); ++k) {
        EXPECT_EQ(permuted.pairs[k].gt, base.pairs[k].gt);
        EXPECT_EQ(permuted.pairs[k].det, base.pairs[k].det);
      }
    }
  }
}

TEST(Match, GreedyEqualsMaximumMatchingOnSeparatedSamples) {
  SplitMix64 rng(2024);
  for (int i = 0; i < 500; ++i) {
    const auto inst = oracle::random_instance(rng, 5, 2);
    EXPECT_EQ(match(inst.gts, inst.dets, center_cfg()).counts().tp,
              oracle::max_matching(inst.gts, inst.dets, false, 0.5));
    EXPECT_EQ(match(inst.gts, inst.dets, iou_cfg()).counts().tp, oracle::max_matching(inst.gts, inst.dets, true, 0.5));
  }
}

TEST(Match, GreedyCanFallShortWhenSamplesOverlap) {
  // A wide gt around a narrow one: the nearest-first rule spends the only
  // detection able to reach the narrow gt on the wide one.
  const std::vector<GroundTruthSample> gts{gt("v", 80, 119), gt("v", 100, 109)};  // C 99 L 40, C 104 L 10
  const std::vector<Detection> dets{det("v", 101, 35), det("v", 115, 35)};
  EXPECT_EQ(oracle::max_matching(gts, dets, false, 0.5), 2);
  EXPECT_EQ(match(gts, dets, center_cfg()).counts().tp, 1);
}

TEST(MatchByVideo, KeepsVideosApart) {
  const std::vector<GroundTruthSample> gts{gt("a", 10, 20), gt("b", 10, 20)};
  const std::vector<Detection> dets{det("a", 15, 11), det("a", 16, 11)};
  const auto r = match_by_video(gts, dets, center_cfg());
  EXPECT_EQ(r.counts(), (EvalCounts{1, 1, 1}));
}

TEST(Prf1, ZeroDenominatorsGiveZero) {
  const auto z = prf1({0, 0, 0});
  EXPECT_EQ(z.precision, 0.0);
  EXPECT_EQ(z.recall, 0.0);
  EXPECT_EQ(z.f1, 0.0);
  const auto only_fn = prf1({0, 0, 4});
  EXPECT_EQ(only_fn.f1, 0.0);
  const auto perfect = prf1({3, 0, 0});
  EXPECT_EQ(perfect.f1, 1.0);
}

TEST(Prf1, ExactRatios) {
  const auto r = prf1({21, 443, 145});
  EXPECT_DOUBLE_EQ(r.precision, 21.0 / 464.0);
  EXPECT_DOUBLE_EQ(r.recall, 21.0 / 166.0);
  EXPECT_NEAR(r.f1, 42.0 / 630.0, 1e-15);
}

TEST(Prf1, F1NeverDecreasesWithMoreTruePositives) {
  for (int fp = 0; fp < 30; fp += 3) {
    for (int fn = 0; fn < 30; fn += 3) {
      double prev = -1.0;
      for (int tp = 0; tp < 40; ++tp) {
        const double f = prf1({tp, fp, fn}).f1;
        EXPECT_GE(f, prev);
        prev = f;
      }
    }
  }
}

TEST(FrameAccuracy, WorkedExamples) {
  const auto g = gt("v", 88, 112);  // C 100, L 25
  ASSERT_EQ(g.center(), 100);
  const std::vector<MatchedPair> pairs{{g, det("v", 105, 35)}};
  EXPECT_DOUBLE_EQ(frame_accuracy(pairs, false), 0.3);
  EXPECT_DOUBLE_EQ(frame_accuracy(pairs, true), 0.2);
  const std::vector<MatchedPair> exact{{g, det("v", 100, 25)}, {gt("v", 0, 9), det("v", 4, 10)}};
  EXPECT_EQ(frame_accuracy(exact, false), 0.0);
  EXPECT_THROW(frame_accuracy(std::vector<MatchedPair>{}, false), Error);
}

TEST(FrameAccuracy, ShiftLinearity) {
  std::vector<MatchedPair> pairs;
  std::vector<MatchedPair> shifted;
  const int deltas[] = {3, -2, 5};
  double expected = 0.0;
  for (int k = 0; k < 3; ++k) {
    const auto g = gt("v", 100 * k, 100 * k + 20 + 2 * k);
    pairs.push_back({g, det("v", g.center(), g.length())});
    shifted.push_back({g, det("v", g.center() + deltas[k], g.length())});
    expected += std::abs(deltas[k]) / (2.0 * g.length()) / 3.0;
  }
  EXPECT_NEAR(frame_accuracy(shifted, false) - frame_accuracy(pairs, false), expected, 1e-15);
}

TEST(Det, HandAggregatedPoint) {
  const std::vector<ScoredRun> runs{{{gt("v", 91, 110)}, {det("v", 100, 35, 2.0), det("v", 300, 35, 1.0)}}};
  const DatasetStats stats{1, 1, 1};
  const auto pts = det_points(runs, stats, center_cfg(), std::vector<double>{5.0, 1.0});
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_EQ(pts[0].fppv, 0.0);
  EXPECT_EQ(pts[0].miss_rate, 1.0);
  EXPECT_EQ(pts[1].fppv, 1.0);
  EXPECT_EQ(pts[1].miss_rate, 0.0);
}

TEST(Det, DefaultThresholdsAndMonotonicity) {
  SplitMix64 rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<ScoredRun> runs;
    DatasetStats stats{0, 1, 0};
    for (int f = 0; f < 3; ++f) {
      auto inst = oracle::random_instance(rng, 5, 2);
      for (auto& d : inst.dets) d.score = rng.uniform();
      stats.videos += 1;
      stats.samples += static_cast<int>(inst.gts.size());
      runs.push_back({inst.gts, inst.dets});
    }
    if (stats.samples == 0) continue;
    const auto thresholds = default_thresholds(runs);
    ASSERT_TRUE(std::isinf(thresholds.front()));
    for (std::size_t i = 1; i < thresholds.size(); ++i) EXPECT_LT(thresholds[i], thresholds[i - 1]);
    const auto pts = det_points(runs, stats, center_cfg());
    EXPECT_EQ(pts.front().fppv, 0.0);
    EXPECT_EQ(pts.front().miss_rate, 1.0);
    for (std::size_t i = 1; i < pts.size(); ++i) {
      EXPECT_GE(pts[i].fppv, pts[i - 1].fppv);
      EXPECT_LE(pts[i].miss_rate, pts[i - 1].miss_rate);
    }
  }
}

TEST(Det, RejectsEmptyDenominators) {
  const std::vector<ScoredRun> runs{{{}, {}}};
  EXPECT_THROW(det_points(runs, DatasetStats{0, 0, 0}, center_cfg()), Error);
  EXPECT_THROW(det_points(runs, DatasetStats{1, 1, 0}, center_cfg()), Error);
}

TEST(EvalConfig, EpsilonRange) {
  EXPECT_THROW(iou_cfg(0.0).validate(), Error);
  EXPECT_THROW(iou_cfg(1.5).validate(), Error);
  EXPECT_NO_THROW(iou_cfg(1.0).validate());
}

}  // namespace
}  // namespace mespot
