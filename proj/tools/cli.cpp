#include "cli.hpp"

#include <fmt/format.h>

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <optional>
#include <sstream>

#include "mespot/config.hpp"
#include "mespot/detections_io.hpp"
#include "mespot/error.hpp"
#include "mespot/fileutil.hpp"
#include "mespot/frames.hpp"
#include "mespot/harness.hpp"
#include "mespot/landmarks.hpp"
#include "mespot/manifest.hpp"
#include "mespot/metrics.hpp"
#include "mespot/report.hpp"
#include "mespot/synth.hpp"

namespace fs = std::filesystem;

namespace mespot {
namespace {

struct Options {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  bool print_config = false;

  std::string manifest;
  std::string detections;
  std::string method = "lbp-chi2";
  std::string out;
  std::string landmarks;
  std::string model;
  std::string profile = "default";
  std::optional<std::string> criterion;
  std::optional<double> epsilon;
  bool apex_mode = false;
  int workers = 0;
};

ToolkitConfig resolve_config(const Options& o) {
  ToolkitConfig cfg;
  if (o.profile == "clean") cfg.synth = FixtureConfig::clean_profile();
  if (o.profile == "distractor") cfg.synth = FixtureConfig::distractor_profile();
  if (!o.config_path.empty()) apply_config_text(cfg, read_text_file(o.config_path), o.config_path);
  if (o.seed) {
    cfg.seed = *o.seed;
    cfg.synth.seed = *o.seed;
  }
  if (o.criterion) cfg.eval.criterion = parse_criterion(*o.criterion);
  if (o.epsilon) cfg.eval.epsilon = *o.epsilon;
  if (o.apex_mode) cfg.eval.apex_mode = true;
  for (const auto& s : o.overrides) apply_override(cfg, s);
  return cfg;
}

fs::path base_dir_of(const std::string& manifest) { return fs::path(manifest).parent_path(); }

SpotterSpec make_spec(const Options& o, const ToolkitConfig& cfg, const DatasetManifest& manifest) {
  SpotterSpec spec;
  spec.method = parse_method(o.method);
  spec.config = cfg;
  if (spec.method == Method::Landmark) {
    const fs::path path = o.landmarks.empty() ? base_dir_of(o.manifest) / "landmarks.csv" : fs::path(o.landmarks);
    spec.landmarks = parse_landmarks(path);
    for (const auto& v : manifest.videos) {
      if (!spec.landmarks.count(v.video_id)) {
        fail(ErrorKind::Coverage, fmt::format("{} has no landmarks for video '{}'", path.string(), v.video_id));
      }
    }
  }
  return spec;
}

FrameLoader loader_for(const std::string& manifest) {
  return [base = base_dir_of(manifest)](const VideoRecord& rec) { return load_frames(rec, base); };
}

std::vector<std::string> all_video_ids(const DatasetManifest& m) {
  std::vector<std::string> ids;
  for (const auto& v : m.videos) ids.push_back(v.video_id);
  return ids;
}

std::string metrics_line(const EvalCounts& c, const Prf1& p) {
  return fmt::format("TP={} FP={} FN={}\nprecision={:.6f} recall={:.6f} f1={:.6f}\n", c.tp, c.fp, c.fn, p.precision,
                     p.recall, p.f1);
}

int cmd_synth(const Options& o, const ToolkitConfig& cfg, std::ostream& out) {
  const auto fixture = generate_fixture(cfg.synth);
  write_fixture(fixture, o.out);
  out << fmt::format("wrote {} videos, {} micro-expressions, {} distractors to {}\n", fixture.manifest.stats.videos,
                     fixture.manifest.stats.samples, fixture.distractors.size(), o.out);
  return kExitOk;
}

int cmd_spot(const Options& o, const ToolkitConfig& cfg, std::ostream& out) {
  const auto manifest = parse_manifest(o.manifest);
  const auto spec = make_spec(o, cfg, manifest);
  std::optional<LinearModel> model;
  if (is_supervised(spec.method)) {
    if (o.model.empty()) fail(ErrorKind::Configuration, fmt::format("method {} needs --model", o.method));
    model = read_linear_model(o.model);
  }
  const auto dets = spot_videos(manifest, all_video_ids(manifest), spec, loader_for(o.manifest),
                                model ? &*model : nullptr, o.workers);
  write_detections(dets, o.out);
  out << fmt::format("{} detections over {} videos written to {}\n", dets.size(), manifest.videos.size(), o.out);
  return kExitOk;
}

int cmd_train(const Options& o, const ToolkitConfig& cfg, std::ostream& out) {
  const auto manifest = parse_manifest(o.manifest);
  const auto spec = make_spec(o, cfg, manifest);
  if (!is_supervised(spec.method)) fail(ErrorKind::Configuration, fmt::format("method {} is not trainable", o.method));
  const auto result = train_supervised(manifest, all_video_ids(manifest), spec, loader_for(o.manifest));
  write_linear_model(result.model, o.out);
  out << fmt::format("trained {} ({} weights), final objective {:.6f}; model written to {}\n", o.method,
                     result.model.weights.size(), result.loss_trace.empty() ? 0.0 : result.loss_trace.back(), o.out);
  return kExitOk;
}

int cmd_eval(const Options& o, const ToolkitConfig& cfg, std::ostream& out) {
  cfg.eval.validate();
  const auto manifest = parse_manifest(o.manifest);
  const auto dets = parse_detections(o.detections, manifest);
  const auto result = match_by_video(manifest.ground_truth, dets, cfg.eval);
  const auto counts = result.counts();
  const auto p = prf1(counts);
  out << fmt::format("criterion={} epsilon={} apex_mode={}\n", to_string(cfg.eval.criterion), cfg.eval.epsilon,
                     cfg.eval.apex_mode);
  out << metrics_line(counts, p);
  const std::string frame_f =
      result.pairs.empty() ? "NA" : fmt::format("{:.6f}", frame_accuracy(result.pairs, cfg.eval.apex_mode));
  out << "frame_F=" << frame_f << '\n';
  if (!o.out.empty()) {
    write_file_atomic(o.out, fmt::format("{}\n{},{},{},{},{:.6f},{:.6f},{:.6f},{}\n", kMetricsHeader,
                                         to_string(cfg.eval.criterion), counts.tp, counts.fp, counts.fn, p.precision,
                                         p.recall, p.f1, frame_f));
  }
  return kExitOk;
}

int cmd_det(const Options& o, const ToolkitConfig& cfg, std::ostream& out) {
  cfg.eval.validate();
  const auto manifest = parse_manifest(o.manifest);
  const auto dets = parse_detections(o.detections, manifest);
  const std::vector<ScoredRun> runs{ScoredRun{manifest.ground_truth, dets}};
  BenchmarkReport report;
  report.det = det_points(runs, manifest.stats, cfg.eval);
  const auto csv = render_det_csv(report);
  if (o.out.empty()) {
    out << csv;
  } else {
    write_file_atomic(o.out, csv);
    out << fmt::format("{} DET points written to {}\n", report.det.size(), o.out);
  }
  return kExitOk;
}

int cmd_loso(const Options& o, const ToolkitConfig& cfg, std::ostream& out) {
  const auto manifest = parse_manifest(o.manifest);
  const auto spec = make_spec(o, cfg, manifest);
  RunOptions run;
  run.workers = o.workers;
  const auto report = run_benchmark(manifest, spec, base_dir_of(o.manifest), run);
  render_report(report, o.out);
  out << render_summary_text(report);
  return kExitOk;
}

int cmd_report(const Options& o, const ToolkitConfig& cfg, std::ostream& out) {
  const auto manifest = parse_manifest(o.manifest);
  const auto dets = parse_detections(o.detections, manifest);
  const auto folds = subject_groups(manifest);
  std::vector<std::vector<Detection>> per_fold;
  for (const auto& f : folds) {
    std::vector<Detection> d;
    for (const auto& det : dets) {
      if (std::find(f.test_videos.begin(), f.test_videos.end(), det.video_id) != f.test_videos.end()) d.push_back(det);
    }
    per_fold.push_back(std::move(d));
  }
  const auto report = evaluate_detections(manifest, folds, per_fold, cfg, "external");
  render_report(report, o.out);
  out << render_summary_text(report);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Micro-expression spotting benchmark toolkit", "mespot"};
  app.set_version_flag("--version", std::string(kToolkitVersion));
  app.require_subcommand(0, 1);
  app.fallthrough();
  app.add_option("--config", o.config_path, "Configuration file (key = value with [section] headers)");
  app.add_option("--set", o.overrides, "Override a configuration key, section.key=value (repeatable)");
  app.add_option("--seed", o.seed, "Seed for fixture generation and training-window sampling");
  app.add_flag("--print-config", o.print_config, "Print the effective configuration and exit");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic fixture");
  synth->add_option("--out", o.out, "Output directory")->required();
  synth->add_option("--profile", o.profile, "Base fixture profile")
      ->check(CLI::IsMember({"default", "clean", "distractor"}));

  auto* spot = app.add_subcommand("spot", "Run a spotter over every manifest video");
  auto* train = app.add_subcommand("train", "Train a linear window classifier on every manifest video");
  auto* eval = app.add_subcommand("eval", "Score a detections file against a manifest");
  auto* det = app.add_subcommand("det", "DET points of a detections file");
  auto* loso = app.add_subcommand("loso", "Leave-one-subject-out benchmark");
  auto* report = app.add_subcommand("report", "Benchmark report of a detections file, grouped by subject");

  for (auto* sub : {spot, train, eval, det, loso, report}) {
    sub->add_option("--manifest", o.manifest, "Dataset manifest")->required()->check(CLI::ExistingFile);
  }
  for (auto* sub : {spot, train, loso}) {
    sub->add_option("--method", o.method, "Spotting method")
        ->check(CLI::IsMember({"lbp-chi2", "mdmd", "landmark", "lbp-top-svm", "hog-top-svm", "higo-top-svm"}));
    sub->add_option("--landmarks", o.landmarks, "Landmarks CSV (default: landmarks.csv beside the manifest)");
  }
  spot->add_option("--model", o.model, "Model file for supervised methods");
  for (auto* sub : {spot, loso}) sub->add_option("--workers", o.workers, "Worker threads (0: all cores)");
  for (auto* sub : {eval, det, report}) {
    sub->add_option("--detections", o.detections, "Detections CSV")->required()->check(CLI::ExistingFile);
  }
  for (auto* sub : {eval, det, loso, report}) {
    sub->add_option("--criterion", o.criterion, "Matching criterion")->check(CLI::IsMember({"center", "iou"}));
    sub->add_option("--epsilon", o.epsilon, "IoU threshold");
    sub->add_flag("--apex-mode", o.apex_mode, "Frame-based F from apex offsets only");
  }
  spot->add_option("--out", o.out, "Detections CSV to write")->required();
  train->add_option("--out", o.out, "Model file to write")->required();
  eval->add_option("--out", o.out, "Optional metrics CSV");
  det->add_option("--out", o.out, "DET CSV (default: standard output)");
  loso->add_option("--out", o.out, "Report directory")->required();
  report->add_option("--out", o.out, "Report directory")->required();

  // --print-config must work without the subcommand's required options
  const bool wants_config = std::find(args.begin(), args.end(), "--print-config") != args.end();
  if (wants_config) {
    for (auto* sub : app.get_subcommands({})) {
      for (auto* opt : sub->get_options()) opt->required(false);
    }
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    const ToolkitConfig cfg = resolve_config(o);
    if (o.print_config) {
      out << to_text(cfg);
      return kExitOk;
    }
    if (app.get_subcommands().empty()) {
      err << "usage error: a subcommand is required\n\n" << app.help();
      return kExitUsage;
    }
    const auto* sub = app.get_subcommands().front();
    if (sub == synth) return cmd_synth(o, cfg, out);
    if (sub == spot) return cmd_spot(o, cfg, out);
    if (sub == train) return cmd_train(o, cfg, out);
    if (sub == eval) return cmd_eval(o, cfg, out);
    if (sub == det) return cmd_det(o, cfg, out);
    if (sub == loso) return cmd_loso(o, cfg, out);
    return cmd_report(o, cfg, out);
  } catch (const Error& e) {
    err << e.what() << '\n';
    return kExitDomainError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomainError;
  }
}

}  // namespace mespot
