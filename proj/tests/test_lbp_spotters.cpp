#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mespot/error.hpp"
#include "mespot/landmarks.hpp"
#include "mespot/lbp.hpp"
#include "mespot/rng.hpp"
#include "mespot/spotters.hpp"
#include "oracles.hpp"
#include "support.hpp"

namespace mespot {
namespace {

using testing::det;

Raster random_raster(int w, int h, SplitMix64& rng, int lo = 0, int hi = 255) {
  Raster r(w, h);
  for (auto& p : r.pixels()) p = static_cast<std::uint8_t>(rng.uniform_int(lo, hi));
  return r;
}

FrameSequence static_sequence(const Raster& base, int n) {
  FrameSequence seq;
  seq.video_id = "v";
  seq.width = base.width();
  seq.height = base.height();
  seq.frames.assign(n, base);
  return seq;
}

TEST(Lbp, UniformTableHas58UniformCodes) {
  const auto& table = uniform_lbp_table();
  int uniform = 0;
  for (int c = 0; c < 256; ++c) {
    EXPECT_EQ(table[c], oracle::uniform_bin(c)) << c;
    uniform += table[c] < 58;
  }
  EXPECT_EQ(uniform, 58);
}

TEST(Lbp, CodesMatchBruteForceOracle) {
  SplitMix64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    // a narrow value range produces many ties
    const Raster r = random_raster(9, 7, rng, 0, trial % 2 ? 3 : 255);
    const auto image = lbp_code_image(r);
    ASSERT_EQ(image.size(), 7u * 5u);
    for (int y = 1; y < 6; ++y) {
      for (int x = 1; x < 8; ++x) {
        EXPECT_EQ(lbp_code(r, x, y), oracle::lbp_code(r, x, y));
        EXPECT_EQ(image[(y - 1) * 7 + (x - 1)], oracle::lbp_code(r, x, y));
      }
    }
  }
}

TEST(Lbp, NeighbourOrderStartsEastCounterClockwise) {
  Raster r(3, 3, 10);
  r.at(2, 1) = 20;  // east -> bit 0
  EXPECT_EQ(lbp_code(r, 1, 1), 0xFF);
  Raster s(3, 3, 0);
  s.at(1, 1) = 5;
  s.at(2, 1) = 9;  // east
  s.at(1, 0) = 9;  // north (y - 1) -> bit 2
  EXPECT_EQ(lbp_code(s, 1, 1), 0b101);
}

TEST(Lbp, SplitEvenPutsRemainderLast) {
  const auto b = split_even(20, 6);
  ASSERT_EQ(b.size(), 6u);
  EXPECT_EQ(b[0], (std::array<int, 2>{0, 3}));
  EXPECT_EQ(b[5], (std::array<int, 2>{15, 20}));
  for (std::size_t i = 1; i < b.size(); ++i) EXPECT_EQ(b[i][0], b[i - 1][1]);
}

TEST(Lbp, BlockHistogramsMatchOracle) {
  SplitMix64 rng(8);
  const Raster r = random_raster(23, 17, rng);
  const auto h = lbp_block_histograms(r, 3);
  ASSERT_EQ(h.size(), 9u * kUniformLbpBins);
  const auto xs = split_even(21, 3), ys = split_even(15, 3);
  for (int by = 0; by < 3; ++by) {
    for (int bx = 0; bx < 3; ++bx) {
      std::vector<double> expect(kUniformLbpBins, 0.0);
      double n = 0;
      for (int y = ys[by][0]; y < ys[by][1]; ++y) {
        for (int x = xs[bx][0]; x < xs[bx][1]; ++x) {
          expect[oracle::uniform_bin(oracle::lbp_code(r, x + 1, y + 1))] += 1;
          n += 1;
        }
      }
      for (int b = 0; b < kUniformLbpBins; ++b) {
        EXPECT_DOUBLE_EQ(h[(by * 3 + bx) * kUniformLbpBins + b], expect[b] / n);
      }
    }
  }
  EXPECT_THROW(lbp_block_histograms(Raster(5, 5), 6), Error);
}

TEST(Chi2, ZeroTermsAndSymmetry) {
  const std::vector<double> a{0, 0.5, 0.5}, b{0, 0.25, 0.75};
  EXPECT_DOUBLE_EQ(chi2_distance(a, b), 0.0625 / 0.75 + 0.0625 / 1.25);
  EXPECT_DOUBLE_EQ(chi2_distance(a, b), chi2_distance(b, a));
  EXPECT_EQ(chi2_distance(a, a), 0.0);
}

TEST(Chi2Curve, StaticVideoIsFlatZero) {
  SplitMix64 rng(1);
  const auto seq = static_sequence(random_raster(32, 32, rng), 60);
  const auto curve = chi2_contrast_curve(seq, {});
  ASSERT_EQ(curve.values.size(), 60u);
  for (double v : curve.values) EXPECT_EQ(v, 0.0);
  EXPECT_TRUE(spot_lbp_chi2(seq, {}).empty());
}

TEST(Chi2Curve, TooShortSequence) {
  SplitMix64 rng(1);
  const auto seq = static_sequence(random_raster(32, 32, rng), 35);
  try {
    chi2_contrast_curve(seq, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SequenceTooShort);
  }
}

TEST(Chi2Curve, MatchesDirectDefinition) {
  SplitMix64 rng(4);
  FrameSequence seq = static_sequence(random_raster(20, 20, rng), 14);
  for (auto& f : seq.frames) f = random_raster(20, 20, rng);
  SpotterConfig cfg;
  cfg.window_length = 7;
  cfg.half_window = 3;
  cfg.lbp_grid = 2;
  const auto curve = chi2_contrast_curve(seq, cfg);
  for (int i = 0; i < 14; ++i) {
    if (i < 3 || i + 3 >= 14) {
      EXPECT_EQ(curve.values[i], 0.0);
      continue;
    }
    const auto c = lbp_block_histograms(seq.frames[i], 2);
    const auto h = lbp_block_histograms(seq.frames[i - 3], 2);
    const auto t = lbp_block_histograms(seq.frames[i + 3], 2);
    double expect = 0.0;
    for (std::size_t b = 0; b < c.size(); ++b) {
      const double ref = (h[b] + t[b]) / 2.0;
      if (c[b] + ref > 0) expect += (c[b] - ref) * (c[b] - ref) / (c[b] + ref);
    }
    EXPECT_NEAR(curve.values[i], expect, 1e-12);
  }
}

TEST(Chi2Curve, InvariantToAdditiveBrightness) {
  SplitMix64 rng(6);
  FrameSequence seq = static_sequence(random_raster(24, 24, rng, 20, 200), 50);
  for (int t = 20; t < 30; ++t) seq.frames[t] = random_raster(24, 24, rng, 20, 200);
  FrameSequence brighter = seq;
  for (auto& f : brighter.frames) {
    for (auto& p : f.pixels()) p = static_cast<std::uint8_t>(p + 40);
  }
  EXPECT_EQ(chi2_contrast_curve(seq, {}).values, chi2_contrast_curve(brighter, {}).values);
}

TEST(ThresholdPeaks, ThresholdAndDominance) {
  SpotterConfig cfg;
  cfg.window_length = 5;  // radius 2
  cfg.half_window = 2;
  ScoreCurve c{"v", std::vector<double>(30, 0.0)};
  c.values[5] = 10;
  c.values[6] = 9;   // inside the radius of 5
  c.values[15] = 4;  // below the threshold
  c.values[22] = 8;
  // mean = 31/30, T = mean + 0.5 (10 - mean)
  const auto peaks = threshold_peaks(c, cfg);
  ASSERT_EQ(peaks.size(), 2u);
  EXPECT_EQ(peaks[0], (Peak{5, 10}));
  EXPECT_EQ(peaks[1], (Peak{22, 8}));
}

TEST(ThresholdPeaks, PlateauKeepsLeftmost) {
  SpotterConfig cfg;
  cfg.window_length = 5;
  cfg.half_window = 2;
  ScoreCurve c{"v", std::vector<double>(20, 0.0)};
  c.values[8] = c.values[9] = c.values[10] = 5;
  const auto peaks = threshold_peaks(c, cfg);
  ASSERT_EQ(peaks.size(), 1u);
  EXPECT_EQ(peaks[0].frame, 8);
}

TEST(ThresholdPeaks, FlatCurveHasNoPeaks) {
  ScoreCurve c{"v", std::vector<double>(50, 2.0)};
  EXPECT_TRUE(threshold_peaks(c, {}).empty());
}

TEST(Nms, MatchesExhaustiveOracle) {
  SplitMix64 rng(17);
  for (int trial = 0; trial < 400; ++trial) {
    std::vector<Detection> dets;
    const int n = static_cast<int>(rng.uniform_int(0, 12));
    for (int i = 0; i < n; ++i) {
      dets.push_back(det("v", static_cast<int>(rng.uniform_int(0, 200)), 35,
                         static_cast<double>(rng.uniform_int(0, 4))));
    }
    const int spacing = static_cast<int>(rng.uniform_int(1, 50));
    const auto kept = nms(dets, spacing);
    EXPECT_EQ(kept, oracle::nms(dets, spacing));
    for (std::size_t i = 0; i < kept.size(); ++i) {
      for (std::size_t j = i + 1; j < kept.size(); ++j) EXPECT_GE(std::abs(kept[i].center - kept[j].center), spacing);
    }
  }
}

TEST(PeaksToDetections, FixedLengthThenNms) {
  SpotterConfig cfg;
  const std::vector<Peak> peaks{{100, 1.0}, {120, 2.0}, {300, 0.5}};
  const auto dets = peaks_to_detections("v", peaks, cfg);
  ASSERT_EQ(dets.size(), 2u);
  EXPECT_EQ(dets[0], det("v", 120, 35, 2.0));
  EXPECT_EQ(dets[1], det("v", 300, 35, 0.5));
  cfg.apply_nms = false;
  EXPECT_EQ(peaks_to_detections("v", peaks, cfg).size(), 3u);
}

TEST(FeatureEngineering, WindowedSumsMatchOracle) {
  SplitMix64 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = static_cast<int>(rng.uniform_int(3, 40));
    const int h = static_cast<int>(rng.uniform_int(1, (n - 1) / 2));
    std::vector<double> a(n);
    for (auto& v : a) v = static_cast<double>(rng.uniform_int(0, 1000)) / 8.0;
    EXPECT_EQ(windowed_sums(a, h), oracle::windowed_sums(a, h));
  }
}

TEST(FeatureEngineering, ApexOfInjectedBump) {
  FeatureMatrix f{60, 3, std::vector<double>(180, 1.0)};
  for (int r = 28; r <= 32; ++r) f.data[r * 3 + 1] = 1.0 + (r == 30 ? 5.0 : 3.0);
  const auto energy = difference_energy(f);
  EXPECT_EQ(energy[0], 0.0);
  EXPECT_EQ(energy[30], 25.0);
  const auto apex = feature_engineering_apex(f, 4);
  // B_i covers [i - 4, i + 3]; the five bump rows fit for i in [29, 32]
  EXPECT_EQ(apex.apex, 29);
  EXPECT_EQ(apex.score, 4 * 9.0 + 25.0);
  EXPECT_THROW(feature_engineering_apex(FeatureMatrix{8, 1, std::vector<double>(8, 0.0)}, 4), Error);
}

TEST(Mdmd, BlockMatchingFindsTranslation) {
  SplitMix64 rng(2);
  const Raster a = random_raster(48, 48, rng);
  Raster b(48, 48);
  for (int y = 0; y < 48; ++y) {
    for (int x = 0; x < 48; ++x) b.at(x, y) = a.at(std::clamp(x - 2, 0, 47), std::clamp(y + 1, 0, 47));
  }
  const auto field = block_motion_field(a, b, 4, 3);
  ASSERT_EQ(field.size(), 16u);
  // interior blocks see the pure shift
  EXPECT_EQ(field[5].dx, 2);
  EXPECT_EQ(field[5].dy, -1);
  EXPECT_EQ(main_direction(field, 8), direction_bin({2, -1}, 8));
}

TEST(Mdmd, DirectionBinsAndStaticField) {
  EXPECT_EQ(direction_bin({1, 0}, 8), 0);
  EXPECT_EQ(direction_bin({3, 1}, 8), 0);
  EXPECT_EQ(direction_bin({0, 1}, 8), 2);
  EXPECT_EQ(direction_bin({-1, 0}, 8), 4);
  const std::vector<MotionVector> zero(9);
  EXPECT_EQ(main_direction(zero, 8), -1);
  EXPECT_EQ(main_direction_magnitude(zero, 8), 0.0);
}

TEST(Mdmd, MagnitudeIsMeanOfLargestThird) {
  const std::vector<MotionVector> f{{1, 0}, {2, 0}, {3, 0}, {0, 1}, {3, 0}, {1, 0}};
  // main direction +x with magnitudes {1, 2, 3, 3, 1}; top third (ceil(5/3) = 2) -> 3, 3
  EXPECT_EQ(main_direction(f, 8), 0);
  EXPECT_DOUBLE_EQ(main_direction_magnitude(f, 8), 3.0);
}

TEST(Mdmd, StaticVideoScoresZero) {
  SplitMix64 rng(3);
  const auto seq = static_sequence(random_raster(32, 32, rng), 40);
  const auto curve = mdmd_curve(seq, {});
  for (double v : curve.values) EXPECT_EQ(v, 0.0);
}

LandmarkTrack still_track(int n) {
  LandmarkTrack t;
  t.video_id = "v";
  std::vector<Point2> pts(68);
  for (int i = 0; i < 68; ++i) pts[i] = {10.0 + i, 20.0 + (i * 7) % 30};
  for (int f = 0; f < n; ++f) t.frames.push_back({f, pts});
  return t;
}

TEST(Landmarks, RatiosReactToBrowRaise) {
  auto track = still_track(80);
  for (int f = 40; f < 46; ++f) track.frames[f].points[landmark68::kRightBrowMid].y -= 3.0;
  const auto curve = landmark_curve(track, {});
  // frame f is compared with frame f - 17, so the raise shows twice
  auto raised = [](int f) { return f >= 40 && f < 46; };
  for (int f = 0; f < 80; ++f) {
    if (raised(f) || (f >= 17 && raised(f - 17))) {
      EXPECT_GT(curve.values[f], 0.0) << f;
    } else {
      EXPECT_EQ(curve.values[f], 0.0) << f;
    }
  }
  const auto dets = spot_landmarks(track, {});
  ASSERT_EQ(dets.size(), 1u);
  EXPECT_GE(dets[0].center, 40);
  EXPECT_LT(dets[0].center, 46);
}

TEST(Landmarks, SparseTrackIsACoverageError) {
  auto track = still_track(80);
  track.frames.erase(track.frames.begin() + 10);
  try {
    landmark_curve(track, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Coverage);
  }
}

}  // namespace
}  // namespace mespot
