#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>

#include "mespot/types.hpp"

namespace mespot {

/// Index layout of the 68-point facial landmark convention.
namespace landmark68 {
inline constexpr int kJawFirst = 0;
inline constexpr int kRightBrowFirst = 17;  // 17..21
inline constexpr int kLeftBrowFirst = 22;   // 22..26
inline constexpr int kNoseBase = 33;
inline constexpr int kRightEyeFirst = 36;   // 36..41
inline constexpr int kLeftEyeFirst = 42;    // 42..47
inline constexpr int kMouthFirst = 48;      // 48..67
inline constexpr int kRightBrowMid = 19;
inline constexpr int kLeftBrowMid = 24;
inline constexpr int kRightEyeUpper = 37;
inline constexpr int kRightEyeLower = 41;
inline constexpr int kLeftEyeUpper = 44;
inline constexpr int kLeftEyeLower = 46;
inline constexpr int kMouthLeft = 48;
inline constexpr int kMouthRight = 54;
inline constexpr int kMouthTop = 51;
inline constexpr int kMouthBottom = 57;
}  // namespace landmark68

/// The three registration points (two eye centers, nose base). A frame with
/// exactly three points is taken as already holding them; a 68-point frame
/// averages each eye contour.
std::array<Point2, 3> registration_points(std::span<const Point2> points);

inline constexpr std::string_view kLandmarksHeader = "video_id,frame,point_index,x,y";

std::string write_landmarks_text(std::span<const LandmarkTrack> tracks);
void write_landmarks(std::span<const LandmarkTrack> tracks, const std::filesystem::path& path);

/// Rows may come in any order; each (video, frame) must list every point
/// index 0..n-1 exactly once, with n uniform across the file for a video.
std::map<std::string, LandmarkTrack> parse_landmarks_text(std::string_view text,
                                                          std::string_view source = "<landmarks>");
std::map<std::string, LandmarkTrack> parse_landmarks(const std::filesystem::path& path);

}  // namespace mespot
