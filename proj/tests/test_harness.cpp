#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <map>
#include <set>

#include "mespot/error.hpp"
#include "mespot/fileutil.hpp"
#include "mespot/harness.hpp"
#include "mespot/report.hpp"
#include "mespot/synth.hpp"
#include "support.hpp"

namespace mespot {
namespace {

// Shared small fixture: 6 videos, 3 subjects, 3 MEs each.
const Fixture& fixture() {
  static const Fixture fx = [] {
    auto cfg = FixtureConfig::clean_profile();
    cfg.videos = 6;
    cfg.subjects = 3;
    cfg.frames_per_video = 500;
    cfg.width = cfg.height = 64;
    return generate_fixture(cfg);
  }();
  return fx;
}

FrameLoader fixture_loader() {
  return [](const VideoRecord& rec) {
    const auto& fx = fixture();
    for (const auto& s : fx.sequences) {
      if (s.video_id == rec.video_id) return s;
    }
    fail(ErrorKind::Io, "no such video " + rec.video_id);
  };
}

SpotterSpec chi2_spec() { return SpotterSpec{Method::LbpChi2, ToolkitConfig{}, {}}; }

TEST(Folds, LosoPartitionsTheVideos) {
  const auto& m = fixture().manifest;
  const auto folds = loso_folds(m);
  ASSERT_EQ(folds.size(), 3u);
  std::multiset<std::string> tested;
  for (const auto& f : folds) {
    std::set<std::string> train(f.train_videos.begin(), f.train_videos.end());
    for (const auto& id : f.test_videos) {
      tested.insert(id);
      EXPECT_EQ(m.find_video(id)->subject_id, f.test_subject);
      EXPECT_FALSE(train.contains(id));
    }
    for (const auto& id : f.train_videos) EXPECT_NE(m.find_video(id)->subject_id, f.test_subject);
    EXPECT_EQ(f.train_videos.size() + f.test_videos.size(), m.videos.size());
  }
  EXPECT_EQ(tested.size(), m.videos.size());
  for (const auto& v : m.videos) EXPECT_EQ(tested.count(v.video_id), 1u);
  EXPECT_TRUE(std::is_sorted(folds.begin(), folds.end(),
                             [](const auto& a, const auto& b) { return a.test_subject < b.test_subject; }));
}

TEST(Folds, SingleSubjectIsAConfigurationError) {
  DatasetManifest m;
  m.videos = {{"a", "s1", 100, 100.0, "a.mesq"}, {"b", "s1", 100, 100.0, "b.mesq"}};
  m.validate_and_update_stats();
  try {
    loso_folds(m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Configuration);
  }
  EXPECT_EQ(subject_groups(m).size(), 1u);
}

std::vector<Detection> all_detections() {
  const auto& m = fixture().manifest;
  std::vector<std::string> ids;
  for (const auto& v : m.videos) ids.push_back(v.video_id);
  return spot_videos(m, ids, chi2_spec(), fixture_loader(), nullptr, 2);
}

std::vector<std::vector<Detection>> split_by_folds(const std::vector<FoldSplit>& folds,
                                                  const std::vector<Detection>& dets) {
  std::vector<std::vector<Detection>> out;
  for (const auto& f : folds) {
    std::vector<Detection> d;
    for (const auto& x : dets) {
      if (std::find(f.test_videos.begin(), f.test_videos.end(), x.video_id) != f.test_videos.end()) d.push_back(x);
    }
    out.push_back(std::move(d));
  }
  return out;
}

TEST(Evaluate, TotalsAreFoldSumsAndPartitionFree) {
  const auto& m = fixture().manifest;
  const auto dets = all_detections();
  const auto folds = loso_folds(m);
  const auto report = evaluate_detections(m, folds, split_by_folds(folds, dets), ToolkitConfig{}, "x");
  EvalCounts c, i;
  for (const auto& f : report.folds) {
    c += f.center;
    i += f.iou;
  }
  EXPECT_EQ(report.center.counts, c);
  EXPECT_EQ(report.iou.counts, i);
  EXPECT_EQ(c.tp + c.fn, m.stats.samples);

  // one fold holding every video
  FoldSplit all{"all", {}, {}};
  for (const auto& v : m.videos) all.test_videos.push_back(v.video_id);
  const auto single = evaluate_detections(m, {all}, {dets}, ToolkitConfig{}, "x");
  EXPECT_EQ(single.center.counts, report.center.counts);
  EXPECT_EQ(single.iou.counts, report.iou.counts);
  ASSERT_TRUE(single.center.frame_f && report.center.frame_f);
  EXPECT_NEAR(*single.center.frame_f, *report.center.frame_f, 1e-12);  // summation order differs
  ASSERT_EQ(single.det.size(), report.det.size());
  for (std::size_t k = 0; k < single.det.size(); ++k) {
    EXPECT_DOUBLE_EQ(single.det[k].fppv, report.det[k].fppv);
    EXPECT_DOUBLE_EQ(single.det[k].miss_rate, report.det[k].miss_rate);
  }
  EXPECT_EQ(single.center.counts, match_by_video(m.ground_truth, dets, EvalConfig{}).counts());

  // a video per fold
  std::vector<FoldSplit> per_video;
  for (const auto& v : m.videos) per_video.push_back({v.video_id, {}, {v.video_id}});
  const auto fine = evaluate_detections(m, per_video, split_by_folds(per_video, dets), ToolkitConfig{}, "x");
  EXPECT_EQ(fine.center.counts, report.center.counts);
  EXPECT_EQ(fine.iou.counts, report.iou.counts);
}

TEST(Evaluate, ZeroDetections) {
  const auto& m = fixture().manifest;
  const auto folds = loso_folds(m);
  const auto report =
      evaluate_detections(m, folds, std::vector<std::vector<Detection>>(folds.size()), ToolkitConfig{}, "none");
  for (const auto* s : {&report.center, &report.iou}) {
    EXPECT_EQ(s->counts, (EvalCounts{0, 0, m.stats.samples}));
    EXPECT_EQ(s->metrics.f1, 0.0);
    EXPECT_FALSE(s->frame_f.has_value());
  }
  const auto csv = render_metrics_csv(report);
  EXPECT_NE(csv.find("center,0,0,18,0.000000,0.000000,0.000000,NA"), std::string::npos) << csv;
  EXPECT_THROW(evaluate_detections(m, folds, {}, ToolkitConfig{}, "x"), Error);
}

TEST(Benchmark, DeterministicAcrossRunsAndWorkers) {
  const auto& m = fixture().manifest;
  const auto a = run_benchmark(m, chi2_spec(), fixture_loader(), {1, std::nullopt});
  const auto b = run_benchmark(m, chi2_spec(), fixture_loader(), {4, std::nullopt});
  EXPECT_EQ(render_summary_text(a), render_summary_text(b));
  EXPECT_EQ(render_metrics_csv(a), render_metrics_csv(b));
  EXPECT_EQ(render_det_csv(a), render_det_csv(b));
  EXPECT_EQ(render_det_csv(a), render_det_csv(a));
  EXPECT_GT(a.center.metrics.f1, 0.5);
  EXPECT_EQ(a.method, "lbp-chi2");
  EXPECT_EQ(a.version, kToolkitVersion);
}

TEST(Benchmark, DetRowsDescend) {
  const auto& m = fixture().manifest;
  const auto r = run_benchmark(m, chi2_spec(), fixture_loader(), {2, std::nullopt});
  ASSERT_GE(r.det.size(), 2u);
  EXPECT_TRUE(std::isinf(r.det.front().threshold));
  EXPECT_EQ(r.det.front().fppv, 0.0);
  EXPECT_EQ(r.det.front().miss_rate, 1.0);
  for (std::size_t k = 1; k < r.det.size(); ++k) {
    EXPECT_LT(r.det[k].threshold, r.det[k - 1].threshold);
    EXPECT_GE(r.det[k].fppv, r.det[k - 1].fppv);
    EXPECT_LE(r.det[k].miss_rate, r.det[k - 1].miss_rate);
  }
  const auto csv = render_det_csv(r);
  EXPECT_EQ(csv.rfind("threshold,fppv,miss_rate\ninf,", 0), 0u) << csv;
}

TEST(Benchmark, RenderReportWritesStableFiles) {
  const auto& m = fixture().manifest;
  const auto r = run_benchmark(m, chi2_spec(), fixture_loader(), {2, std::nullopt});
  testing::TempDir dir;
  render_report(r, dir / "out");
  const auto first = read_text_file(dir / "out/summary.txt") + read_text_file(dir / "out/metrics.csv") +
                     read_text_file(dir / "out/det.csv");
  render_report(r, dir / "out");
  const auto second = read_text_file(dir / "out/summary.txt") + read_text_file(dir / "out/metrics.csv") +
                      read_text_file(dir / "out/det.csv");
  EXPECT_EQ(first, second);
  EXPECT_EQ(read_text_file(dir / "out/metrics.csv"), render_metrics_csv(r));
}

TEST(Benchmark, MissingFramesFailBeforeAnyOutput) {
  testing::TempDir dir;
  write_fixture(fixture(), dir.path());
  const auto& m = fixture().manifest;
  std::filesystem::remove(dir / m.videos.back().frames_path);
  try {
    run_benchmark(m, chi2_spec(), dir.path());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Io);
    EXPECT_NE(std::string(e.what()).find(m.videos.back().video_id), std::string::npos);
  }
}

TEST(Benchmark, FoldFailureNamesTheFold) {
  const auto& m = fixture().manifest;
  FrameLoader broken = [](const VideoRecord& rec) -> FrameSequence {
    if (rec.subject_id == "s02") fail(ErrorKind::Io, "disk gone");
    return fixture_loader()(rec);
  };
  try {
    run_benchmark(m, chi2_spec(), broken, {2, std::nullopt});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Io);
    EXPECT_NE(std::string(e.what()).find("fold 's02'"), std::string::npos) << e.what();
  }
}

TEST(Methods, NamesRoundTrip) {
  for (auto m : {Method::LbpChi2, Method::Mdmd, Method::Landmark, Method::LbpTopSvm, Method::HogTopSvm,
                 Method::HigoTopSvm}) {
    EXPECT_EQ(parse_method(to_string(m)), m);
  }
  EXPECT_THROW(parse_method("svm"), Error);
  EXPECT_TRUE(is_supervised(Method::HigoTopSvm));
  EXPECT_FALSE(needs_frames(Method::Landmark));
}

TEST(Methods, LandmarkSpotterRunsFromTracks) {
  const auto& fx = fixture();
  SpotterSpec spec{Method::Landmark, ToolkitConfig{}, {}};
  for (const auto& t : fx.landmarks) spec.landmarks[t.video_id] = t;
  FrameLoader never = [](const VideoRecord&) -> FrameSequence { fail(ErrorKind::Io, "frames not expected"); };
  const auto r = run_benchmark(fx.manifest, spec, never, {2, std::nullopt});
  EXPECT_GT(r.center.counts.tp, 0);
}

}  // namespace
}  // namespace mespot
