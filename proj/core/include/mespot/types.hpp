#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mespot/interval.hpp"

namespace mespot {

/// 8-bit grayscale raster, row-major.
class Raster {
 public:
  Raster() = default;
  Raster(int width, int height, std::uint8_t fill = 0);
  Raster(int width, int height, std::vector<std::uint8_t> pixels);

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return pixels_.empty(); }

  std::uint8_t at(int x, int y) const { return pixels_[static_cast<std::size_t>(y) * width_ + x]; }
  std::uint8_t& at(int x, int y) { return pixels_[static_cast<std::size_t>(y) * width_ + x]; }

  std::span<const std::uint8_t> pixels() const { return pixels_; }
  std::span<std::uint8_t> pixels() { return pixels_; }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

/// A long video as equally sized grayscale frames.
struct FrameSequence {
  std::string video_id;
  int width = 0;
  int height = 0;
  double fps = 100.0;
  std::vector<Raster> frames;

  int frame_count() const { return static_cast<int>(frames.size()); }

  /// Throws ErrorKind::Validation when frames are missing or not uniformly sized.
  void validate() const;
};

struct GroundTruthSample {
  std::string video_id;
  std::string subject_id;
  int onset = 0;
  int offset = 0;

  Interval interval() const { return {onset, offset}; }
  int center() const { return interval().center(); }
  int length() const { return offset - onset + 1; }

  friend bool operator==(const GroundTruthSample&, const GroundTruthSample&) = default;
};

struct Detection {
  std::string video_id;
  int center = 0;
  int length = 1;
  double score = 0.0;

  Interval interval() const { return from_center_length(center, length); }

  friend bool operator==(const Detection&, const Detection&) = default;
};

struct VideoRecord {
  std::string video_id;
  std::string subject_id;
  int frame_count = 1;
  double fps = 100.0;
  std::string frames_path;

  friend bool operator==(const VideoRecord&, const VideoRecord&) = default;
};

struct DatasetStats {
  int videos = 0;    // V
  int subjects = 0;  // S
  int samples = 0;   // N+

  friend bool operator==(const DatasetStats&, const DatasetStats&) = default;
};

struct DatasetManifest {
  std::vector<VideoRecord> videos;
  std::vector<GroundTruthSample> ground_truth;
  DatasetStats stats;

  const VideoRecord* find_video(const std::string& video_id) const;
  std::vector<GroundTruthSample> ground_truth_for(const std::string& video_id) const;

  /// Checks every invariant and recomputes stats. Throws ErrorKind::Validation.
  void validate_and_update_stats();

  friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

DatasetStats compute_stats(const DatasetManifest& manifest);

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

struct LandmarkFrame {
  int frame = 0;
  std::vector<Point2> points;
};

/// Landmarks for one video. Frames are sorted by index; a dense track has one
/// entry per video frame, a sparse one lists only the sampled frames.
struct LandmarkTrack {
  static constexpr int kDefaultPointCount = 68;

  std::string video_id;
  int points_per_frame = kDefaultPointCount;
  std::vector<LandmarkFrame> frames;

  const LandmarkFrame* find(int frame) const;
  bool is_dense(int frame_count) const;
};

struct AlignmentTemplate {
  std::array<Point2, 3> points{Point2{42, 51}, Point2{86, 51}, Point2{64, 100}};
  int width = 128;
  int height = 128;
};

}  // namespace mespot
