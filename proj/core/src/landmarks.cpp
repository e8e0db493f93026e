#include "mespot/landmarks.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "mespot/error.hpp"
#include "mespot/fileutil.hpp"

namespace mespot {

const LandmarkFrame* LandmarkTrack::find(int frame) const {
  const auto it = std::lower_bound(frames.begin(), frames.end(), frame,
                                   [](const LandmarkFrame& f, int idx) { return f.frame < idx; });
  return (it != frames.end() && it->frame == frame) ? &*it : nullptr;
}

bool LandmarkTrack::is_dense(int frame_count) const {
  if (static_cast<int>(frames.size()) != frame_count) return false;
  for (int i = 0; i < frame_count; ++i) {
    if (frames[i].frame != i) return false;
  }
  return true;
}

std::array<Point2, 3> registration_points(std::span<const Point2> points) {
  if (points.size() == 3) return {points[0], points[1], points[2]};
  if (points.size() < 48) {
    fail(ErrorKind::Coverage, fmt::format("{} landmark points cannot supply registration points", points.size()));
  }
  auto eye_center = [&](int first) {
    Point2 c;
    for (int i = first; i < first + 6; ++i) {
      c.x += points[i].x;
      c.y += points[i].y;
    }
    return Point2{c.x / 6.0, c.y / 6.0};
  };
  return {eye_center(landmark68::kRightEyeFirst), eye_center(landmark68::kLeftEyeFirst),
          points[landmark68::kNoseBase]};
}

std::string write_landmarks_text(std::span<const LandmarkTrack> tracks) {
  std::string out(kLandmarksHeader);
  out += '\n';
  for (const auto& t : tracks) {
    for (const auto& f : t.frames) {
      for (std::size_t i = 0; i < f.points.size(); ++i) {
        out += fmt::format("{},{},{},{},{}\n", t.video_id, f.frame, i, f.points[i].x, f.points[i].y);
      }
    }
  }
  return out;
}

void write_landmarks(std::span<const LandmarkTrack> tracks, const std::filesystem::path& path) {
  write_file_atomic(path, write_landmarks_text(tracks));
}

std::map<std::string, LandmarkTrack> parse_landmarks_text(std::string_view text, std::string_view source) {
  struct Row {
    int frame;
    int index;
    Point2 p;
  };
  std::map<std::string, std::vector<Row>> rows;
  bool header_seen = false;
  int line_no = 0;
  for (std::string_view rest = text; !rest.empty();) {
    const auto nl = rest.find('\n');
    const std::string_view line = trim(rest.substr(0, nl));
    rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      if (line != kLandmarksHeader) {
        fail(ErrorKind::Parse, fmt::format("{}:{}: expected header '{}'", source, line_no, kLandmarksHeader));
      }
      header_seen = true;
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 5) fail(ErrorKind::Parse, fmt::format("{}:{}: expected 5 fields", source, line_no));
    const auto frame = parse_integer(f[1]).value_or(-1);
    const auto index = parse_integer(f[2]).value_or(-1);
    const double x = parse_real(f[3]).value_or(std::nan(""));
    const double y = parse_real(f[4]).value_or(std::nan(""));
    if (frame < 0 || index < 0 || !std::isfinite(x) || !std::isfinite(y)) {
      fail(ErrorKind::Parse, fmt::format("{}:{}: malformed landmark row", source, line_no));
    }
    rows[std::string(f[0])].push_back({static_cast<int>(frame), static_cast<int>(index), {x, y}});
  }

  std::map<std::string, LandmarkTrack> out;
  for (auto& [video, list] : rows) {
    std::sort(list.begin(), list.end(), [](const Row& a, const Row& b) {
      return a.frame != b.frame ? a.frame < b.frame : a.index < b.index;
    });
    LandmarkTrack track;
    track.video_id = video;
    track.points_per_frame = -1;
    for (std::size_t i = 0; i < list.size();) {
      LandmarkFrame lf;
      lf.frame = list[i].frame;
      for (; i < list.size() && list[i].frame == lf.frame; ++i) {
        if (list[i].index != static_cast<int>(lf.points.size())) {
          fail(ErrorKind::Parse, fmt::format("{}: video {} frame {} has missing or duplicate point indices",
                                             source, video, lf.frame));
        }
        lf.points.push_back(list[i].p);
      }
      if (track.points_per_frame < 0) track.points_per_frame = static_cast<int>(lf.points.size());
      if (static_cast<int>(lf.points.size()) != track.points_per_frame) {
        fail(ErrorKind::Parse, fmt::format("{}: video {} has a varying point count", source, video));
      }
      track.frames.push_back(std::move(lf));
    }
    out.emplace(video, std::move(track));
  }
  return out;
}

std::map<std::string, LandmarkTrack> parse_landmarks(const std::filesystem::path& path) {
  return parse_landmarks_text(read_text_file(path), path.string());
}

}  // namespace mespot
