#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mespot/types.hpp"

namespace mespot {

inline constexpr std::string_view kDetectionsHeader = "video_id,center,length,score";

/// Parses a detections CSV (header `video_id,center,length,score`). An empty
/// file yields no detections. Output is grouped by video in manifest order,
/// preserving file order within a video. Unknown videos raise
/// ErrorKind::Reference; malformed rows or non-finite scores raise
/// ErrorKind::Parse.
std::vector<Detection> parse_detections_text(std::string_view text, const DatasetManifest& manifest,
                                             std::string_view source = "<detections>");
std::vector<Detection> parse_detections(const std::filesystem::path& path,
                                        const DatasetManifest& manifest);

std::string write_detections_text(const std::vector<Detection>& detections);
void write_detections(const std::vector<Detection>& detections, const std::filesystem::path& path);

}  // namespace mespot
