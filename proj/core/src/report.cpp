#include "mespot/report.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "mespot/error.hpp"
#include "mespot/fileutil.hpp"

namespace mespot {
namespace {

std::string frame_f_text(const std::optional<double>& f) { return f ? fmt::format("{:.6f}", *f) : "NA"; }

std::string metrics_row(std::string_view name, const CriterionSummary& s) {
  return fmt::format("{},{},{},{},{:.6f},{:.6f},{:.6f},{}\n", name, s.counts.tp, s.counts.fp, s.counts.fn,
                     s.metrics.precision, s.metrics.recall, s.metrics.f1, frame_f_text(s.frame_f));
}

std::string threshold_text(double t) {
  if (std::isinf(t)) return t > 0 ? "inf" : "-inf";
  return fmt::format("{}", t);
}

}  // namespace

std::string render_summary_text(const BenchmarkReport& report) {
  std::string out;
  out += fmt::format("{}\n", report.version);
  out += fmt::format("method: {}\n", report.method);
  out += fmt::format("videos: {}  subjects: {}  samples: {}\n\n", report.stats.videos, report.stats.subjects,
                     report.stats.samples);
  out += "fold        center TP/FP/FN    iou TP/FP/FN\n";
  for (const auto& f : report.folds) {
    out += fmt::format("{:<10}  {:>5}/{:>5}/{:>5}  {:>5}/{:>5}/{:>5}\n", f.test_subject, f.center.tp, f.center.fp,
                       f.center.fn, f.iou.tp, f.iou.fp, f.iou.fn);
  }
  out += "\n";
  for (const auto& [name, s] : {std::pair<std::string_view, const CriterionSummary&>{"center", report.center},
                                std::pair<std::string_view, const CriterionSummary&>{"iou", report.iou}}) {
    out += fmt::format("{:<6}  TP={} FP={} FN={}  precision={:.4f} recall={:.4f} F1={:.4f}  frame_F={}\n", name,
                       s.counts.tp, s.counts.fp, s.counts.fn, s.metrics.precision, s.metrics.recall, s.metrics.f1,
                       frame_f_text(s.frame_f));
  }
  out += fmt::format("\nDET ({} points, {} criterion)\n", report.det.size(), to_string(report.det_criterion));
  out += "\n# configuration\n";
  out += report.config_text;
  return out;
}

std::string render_metrics_csv(const BenchmarkReport& report) {
  std::string out(kMetricsHeader);
  out += '\n';
  out += metrics_row("center", report.center);
  out += metrics_row("iou", report.iou);
  return out;
}

std::string render_det_csv(const BenchmarkReport& report) {
  auto points = report.det;
  std::stable_sort(points.begin(), points.end(),
                   [](const DetPoint& a, const DetPoint& b) { return a.threshold > b.threshold; });
  std::string out(kDetHeader);
  out += '\n';
  for (const auto& p : points) {
    out += fmt::format("{},{:.6f},{:.6f}\n", threshold_text(p.threshold), p.fppv, p.miss_rate);
  }
  return out;
}

void render_report(const BenchmarkReport& report, const std::filesystem::path& dir, unsigned formats) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorKind::Io, fmt::format("cannot create report directory {}: {}", dir.string(), ec.message()));
  if (formats & kReportSummary) write_file_atomic(dir / "summary.txt", render_summary_text(report));
  if (formats & kReportMetrics) write_file_atomic(dir / "metrics.csv", render_metrics_csv(report));
  if (formats & kReportDet) write_file_atomic(dir / "det.csv", render_det_csv(report));
}

}  // namespace mespot
