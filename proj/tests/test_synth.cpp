#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mespot/error.hpp"
#include "mespot/fileutil.hpp"
#include "mespot/spotters.hpp"
#include "mespot/synth.hpp"
#include "support.hpp"

namespace mespot {
namespace {

FixtureConfig small(FixtureConfig cfg) {
  cfg.videos = 2;
  cfg.subjects = 2;
  cfg.frames_per_video = 1200;
  cfg.width = cfg.height = 64;
  return cfg;
}

TEST(Synth, DeterministicBytes) {
  const auto cfg = small(FixtureConfig::distractor_profile());
  testing::TempDir a, b;
  write_fixture(generate_fixture(cfg), a.path());
  write_fixture(generate_fixture(cfg), b.path());
  for (const char* name : {"manifest.txt", "landmarks.csv", "distractors.csv", "frames/s01_v001.mesq",
                           "frames/s02_v002.mesq"}) {
    EXPECT_EQ(read_text_file(a / name), read_text_file(b / name)) << name;
  }
  auto other = cfg;
  other.seed += 1;
  EXPECT_NE(generate_fixture(other).manifest, generate_fixture(cfg).manifest);
}

TEST(Synth, CleanProfileCountsAndShape) {
  const auto fx = generate_fixture(FixtureConfig::clean_profile());
  EXPECT_EQ(fx.manifest.stats.videos, 4);
  EXPECT_EQ(fx.manifest.stats.subjects, 2);
  EXPECT_EQ(fx.manifest.stats.samples, 12);
  EXPECT_TRUE(fx.distractors.empty());
  ASSERT_EQ(fx.sequences.size(), 4u);
  for (std::size_t i = 0; i < fx.sequences.size(); ++i) {
    EXPECT_EQ(fx.sequences[i].frame_count(), 2200);
    EXPECT_EQ(fx.sequences[i].width, 128);
    EXPECT_EQ(fx.landmarks[i].frames.size(), 2200u);
    EXPECT_TRUE(fx.landmarks[i].is_dense(2200));
  }
}

TEST(Synth, EventLengthsAndSeparation) {
  for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
    auto cfg = FixtureConfig::distractor_profile();
    cfg.seed = seed;
    cfg.frames_per_video = 1500;
    cfg.width = cfg.height = 48;
    const auto fx = generate_fixture(cfg);
    for (const auto& v : fx.manifest.videos) {
      std::vector<Interval> events;
      for (const auto& g : fx.manifest.ground_truth_for(v.video_id)) {
        EXPECT_GE(g.length(), 10);
        EXPECT_LE(g.length(), 51);
        events.push_back(g.interval());
      }
      for (const auto& d : fx.distractors) {
        if (d.video_id == v.video_id) events.push_back({d.onset, d.offset});
      }
      std::sort(events.begin(), events.end(), [](auto& a, auto& b) { return a.onset < b.onset; });
      for (std::size_t i = 0; i < events.size(); ++i) {
        EXPECT_GE(events[i].onset, 35);
        EXPECT_LE(events[i].offset, v.frame_count - 36);
        if (i > 0) {
          EXPECT_GT(events[i].onset - events[i - 1].offset, 35) << seed;
        }
      }
    }
  }
}

TEST(Synth, DistractorLog) {
  const auto fx = generate_fixture(small(FixtureConfig::distractor_profile()));
  EXPECT_FALSE(fx.distractors.empty());
  const auto text = write_distractors_text(fx.distractors);
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, kDistractorHeader);
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_TRUE(line.find(",blink,") != std::string::npos || line.find(",head_shift,") != std::string::npos ||
                line.find(",macro_expression,") != std::string::npos)
        << line;
  }
  EXPECT_EQ(rows, static_cast<int>(fx.distractors.size()));
}

// SNR = (peak - background mean) / background std, background being every
// frame more than L away from an injected event.
TEST(Synth, InjectedEventsStandOutOfTheChi2Curve) {
  const auto fx = generate_fixture(FixtureConfig::clean_profile());
  const SpotterConfig spot;
  for (const auto& seq : fx.sequences) {
    const auto curve = chi2_contrast_curve(seq, spot);
    const auto gts = fx.manifest.ground_truth_for(seq.video_id);
    std::vector<double> background;
    for (int f = spot.half_window; f < seq.frame_count() - spot.half_window; ++f) {
      const bool near = std::any_of(gts.begin(), gts.end(), [&](const auto& g) {
        return f >= g.onset - spot.window_length && f <= g.offset + spot.window_length;
      });
      if (!near) background.push_back(curve.values[f]);
    }
    double mean = 0.0, var = 0.0;
    for (double v : background) mean += v / static_cast<double>(background.size());
    for (double v : background) var += (v - mean) * (v - mean) / static_cast<double>(background.size());
    ASSERT_GT(var, 0.0);
    for (const auto& g : gts) {
      const double peak = *std::max_element(curve.values.begin() + g.onset, curve.values.begin() + g.offset + 1);
      EXPECT_GT((peak - mean) / std::sqrt(var), 5.0) << seq.video_id << " @" << g.onset;
    }
  }
}

TEST(Synth, ConfigValidation) {
  auto expect_config_error = [](FixtureConfig cfg) {
    try {
      generate_fixture(cfg);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::Configuration);
    }
  };
  auto cfg = small(FixtureConfig{});
  cfg.subjects = 3;
  expect_config_error(cfg);
  cfg = small(FixtureConfig{});
  cfg.me_length_min = 60;
  cfg.me_length_max = 20;
  expect_config_error(cfg);
  cfg = small(FixtureConfig{});
  cfg.mes_min = cfg.mes_max = 40;  // cannot fit into 1200 frames
  expect_config_error(cfg);
  cfg = small(FixtureConfig{});
  cfg.distractors.blink = -1;
  expect_config_error(cfg);
}

}  // namespace
}  // namespace mespot
