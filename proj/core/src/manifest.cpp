#include "mespot/manifest.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <limits>
#include <cmath>
#include <set>
#include <unordered_set>

#include "mespot/error.hpp"
#include "mespot/fileutil.hpp"

namespace mespot {

const VideoRecord* DatasetManifest::find_video(const std::string& video_id) const {
  const auto it = std::find_if(videos.begin(), videos.end(),
                               [&](const VideoRecord& v) { return v.video_id == video_id; });
  return it == videos.end() ? nullptr : &*it;
}

std::vector<GroundTruthSample> DatasetManifest::ground_truth_for(const std::string& video_id) const {
  std::vector<GroundTruthSample> out;
  for (const auto& gt : ground_truth) {
    if (gt.video_id == video_id) out.push_back(gt);
  }
  return out;
}

DatasetStats compute_stats(const DatasetManifest& manifest) {
  std::set<std::string> subjects;
  for (const auto& v : manifest.videos) subjects.insert(v.subject_id);
  return {static_cast<int>(manifest.videos.size()), static_cast<int>(subjects.size()),
          static_cast<int>(manifest.ground_truth.size())};
}

void DatasetManifest::validate_and_update_stats() {
  if (videos.empty()) fail(ErrorKind::Validation, "manifest lists no videos");
  std::unordered_set<std::string> seen;
  for (const auto& v : videos) {
    if (v.video_id.empty()) fail(ErrorKind::Validation, "empty video_id");
    if (v.subject_id.empty()) fail(ErrorKind::Validation, "video " + v.video_id + " has no subject_id");
    if (v.frame_count < 1) fail(ErrorKind::Validation, "video " + v.video_id + " has frame_count < 1");
    if (!(v.fps > 0.0) || !std::isfinite(v.fps)) {
      fail(ErrorKind::Validation, "video " + v.video_id + " has a non-positive fps");
    }
    if (!seen.insert(v.video_id).second) {
      fail(ErrorKind::Validation, "duplicate video_id " + v.video_id);
    }
  }
  for (auto& gt : ground_truth) {
    const VideoRecord* video = find_video(gt.video_id);
    if (!video) fail(ErrorKind::Validation, "ground truth references unknown video " + gt.video_id);
    if (gt.subject_id.empty()) gt.subject_id = video->subject_id;
    if (gt.subject_id != video->subject_id) {
      fail(ErrorKind::Validation, "ground truth subject mismatch for video " + gt.video_id);
    }
    if (gt.onset < 0 || gt.offset < gt.onset || gt.offset >= video->frame_count) {
      fail(ErrorKind::Validation,
           fmt::format("interval [{}, {}] invalid for video {} with {} frames", gt.onset, gt.offset,
                       gt.video_id, video->frame_count));
    }
  }
  stats = compute_stats(*this);
}

namespace {

enum class Section { None, Videos, GroundTruth };

[[noreturn]] void parse_fail(std::string_view source, int line, const std::string& msg) {
  fail(ErrorKind::Parse, fmt::format("{}:{}: {}", source, line, msg));
}

int field_int(std::string_view source, int line, std::string_view field, const char* name) {
  const auto v = parse_integer(field);
  if (!v || *v < std::numeric_limits<int>::min() || *v > std::numeric_limits<int>::max()) {
    parse_fail(source, line, fmt::format("{} is not an integer: '{}'", name, field));
  }
  return static_cast<int>(*v);
}

}  // namespace

DatasetManifest parse_manifest_text(std::string_view text, std::string_view source) {
  DatasetManifest m;
  Section section = Section::None;
  int line_no = 0;
  for (std::string_view rest = text; !rest.empty();) {
    const auto nl = rest.find('\n');
    std::string_view raw = rest.substr(0, nl);
    rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
    ++line_no;

    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    const std::string_view line = trim(raw);
    if (line.empty()) continue;

    if (line == "[videos]") {
      section = Section::Videos;
      continue;
    }
    if (line == "[ground_truth]") {
      section = Section::GroundTruth;
      continue;
    }
    if (line.front() == '[') parse_fail(source, line_no, fmt::format("unknown section {}", line));

    const auto f = split(line, ',');
    switch (section) {
      case Section::None:
        parse_fail(source, line_no, "row outside of any section");
      case Section::Videos: {
        if (line == "video_id,subject_id,frame_count,fps,frames_path") continue;
        if (f.size() != 5) parse_fail(source, line_no, "expected 5 fields in [videos] row");
        VideoRecord v;
        v.video_id = std::string(f[0]);
        v.subject_id = std::string(f[1]);
        v.frame_count = field_int(source, line_no, f[2], "frame_count");
        const auto fps = parse_real(f[3]);
        if (!fps) parse_fail(source, line_no, fmt::format("fps is not a number: '{}'", f[3]));
        v.fps = *fps;
        v.frames_path = std::string(f[4]);
        if (v.video_id.empty() || v.subject_id.empty()) parse_fail(source, line_no, "empty id field");
        m.videos.push_back(std::move(v));
        break;
      }
      case Section::GroundTruth: {
        if (line == "video_id,onset,offset") continue;
        if (f.size() != 3) parse_fail(source, line_no, "expected 3 fields in [ground_truth] row");
        GroundTruthSample gt;
        gt.video_id = std::string(f[0]);
        gt.onset = field_int(source, line_no, f[1], "onset");
        gt.offset = field_int(source, line_no, f[2], "offset");
        if (gt.offset < gt.onset) {
          fail(ErrorKind::Validation,
               fmt::format("{}:{}: offset {} precedes onset {}", source, line_no, gt.offset, gt.onset));
        }
        m.ground_truth.push_back(std::move(gt));
        break;
      }
    }
  }
  m.validate_and_update_stats();
  return m;
}

DatasetManifest parse_manifest(const std::filesystem::path& path) {
  return parse_manifest_text(read_text_file(path), path.string());
}

std::string write_manifest_text(const DatasetManifest& manifest) {
  std::string out = "# mespot manifest v1; frame indices are 0-based and inclusive\n[videos]\n";
  out += "# video_id,subject_id,frame_count,fps,frames_path\n";
  for (const auto& v : manifest.videos) {
    out += fmt::format("{},{},{},{},{}\n", v.video_id, v.subject_id, v.frame_count, v.fps, v.frames_path);
  }
  out += "[ground_truth]\n# video_id,onset,offset\n";
  for (const auto& gt : manifest.ground_truth) {
    out += fmt::format("{},{},{}\n", gt.video_id, gt.onset, gt.offset);
  }
  return out;
}

void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
  write_file_atomic(path, write_manifest_text(manifest));
}

}  // namespace mespot
