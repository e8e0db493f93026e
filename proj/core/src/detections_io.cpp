#include "mespot/detections_io.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>
#include <unordered_map>

#include "mespot/error.hpp"
#include "mespot/fileutil.hpp"

namespace mespot {

std::vector<Detection> parse_detections_text(std::string_view text, const DatasetManifest& manifest,
                                             std::string_view source) {
  std::unordered_map<std::string, std::size_t> order;
  for (std::size_t i = 0; i < manifest.videos.size(); ++i) order.emplace(manifest.videos[i].video_id, i);

  std::vector<std::vector<Detection>> grouped(manifest.videos.size());
  bool header_seen = false;
  int line_no = 0;
  for (std::string_view rest = text; !rest.empty();) {
    const auto nl = rest.find('\n');
    const std::string_view line = trim(rest.substr(0, nl));
    rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      if (line != kDetectionsHeader) {
        fail(ErrorKind::Parse, fmt::format("{}:{}: expected header '{}'", source, line_no, kDetectionsHeader));
      }
      header_seen = true;
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 4) fail(ErrorKind::Parse, fmt::format("{}:{}: expected 4 fields", source, line_no));

    Detection d;
    d.video_id = std::string(f[0]);
    const auto center = parse_integer(f[1]);
    const auto length = parse_integer(f[2]);
    const auto score = parse_real(f[3]);
    if (!center || !length || *center > std::numeric_limits<int>::max() ||
        *length > std::numeric_limits<int>::max()) {
      fail(ErrorKind::Parse, fmt::format("{}:{}: center and length must be integers", source, line_no));
    }
    if (!score || !std::isfinite(*score)) {
      fail(ErrorKind::Parse, fmt::format("{}:{}: score must be a finite number", source, line_no));
    }
    d.center = static_cast<int>(*center);
    d.length = static_cast<int>(*length);
    d.score = *score;

    const auto it = order.find(d.video_id);
    if (it == order.end()) {
      fail(ErrorKind::Reference,
           fmt::format("{}:{}: video '{}' is not in the manifest", source, line_no, d.video_id));
    }
    const VideoRecord& video = manifest.videos[it->second];
    if (d.length < 1 || d.center < 0 || d.center >= video.frame_count) {
      fail(ErrorKind::Validation,
           fmt::format("{}:{}: detection (center {}, length {}) outside video {}", source, line_no,
                       d.center, d.length, d.video_id));
    }
    grouped[it->second].push_back(std::move(d));
  }

  std::vector<Detection> out;
  for (auto& g : grouped) {
    for (auto& d : g) out.push_back(std::move(d));
  }
  return out;
}

std::vector<Detection> parse_detections(const std::filesystem::path& path,
                                        const DatasetManifest& manifest) {
  return parse_detections_text(read_text_file(path), manifest, path.string());
}

std::string write_detections_text(const std::vector<Detection>& detections) {
  std::string out(kDetectionsHeader);
  out += '\n';
  for (const auto& d : detections) out += fmt::format("{},{},{},{}\n", d.video_id, d.center, d.length, d.score);
  return out;
}

void write_detections(const std::vector<Detection>& detections, const std::filesystem::path& path) {
  write_file_atomic(path, write_detections_text(detections));
}

}  // namespace mespot
