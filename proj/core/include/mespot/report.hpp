#pragma once

#include <filesystem>
#include <string>

#include "mespot/harness.hpp"

namespace mespot {

inline constexpr std::string_view kMetricsHeader = "criterion,TP,FP,FN,precision,recall,f1,frame_F";
inline constexpr std::string_view kDetHeader = "threshold,fppv,miss_rate";

enum ReportFormat : unsigned {
  kReportSummary = 1u << 0,
  kReportMetrics = 1u << 1,
  kReportDet = 1u << 2,
  kReportAll = kReportSummary | kReportMetrics | kReportDet,
};

std::string render_summary_text(const BenchmarkReport& report);
/// Rows `center` then `iou`; frame_F is NA without true positives.
std::string render_metrics_csv(const BenchmarkReport& report);
/// Rows by descending threshold.
std::string render_det_csv(const BenchmarkReport& report);

/// Writes summary.txt, metrics.csv and det.csv (as selected) into `dir`,
/// each atomically. Throws ErrorKind::Io if `dir` is not writable.
void render_report(const BenchmarkReport& report, const std::filesystem::path& dir,
                   unsigned formats = kReportAll);

}  // namespace mespot
