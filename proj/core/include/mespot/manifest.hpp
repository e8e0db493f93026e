#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "mespot/types.hpp"

namespace mespot {

// Manifest text format (UTF-8, one record per line, '#' starts a comment):
//
//   [videos]
//   video_id,subject_id,frame_count,fps,frames_path
//   [ground_truth]
//   video_id,onset,offset
//
// Frame indices are 0-based and inclusive. Ids may not contain commas. A row
// that repeats the column names of its section is treated as a header.

DatasetManifest parse_manifest_text(std::string_view text, std::string_view source = "<manifest>");
DatasetManifest parse_manifest(const std::filesystem::path& path);

/// Canonical serialization; parse_manifest_text(write_manifest_text(m)) == m.
std::string write_manifest_text(const DatasetManifest& manifest);
void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

}  // namespace mespot
