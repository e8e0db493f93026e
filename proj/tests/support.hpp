#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "mespot/types.hpp"

namespace mespot::testing {

inline GroundTruthSample gt(const std::string& video, int onset, int offset, const std::string& subject = "s01") {
  return {video, subject, onset, offset};
}

inline Detection det(const std::string& video, int center, int length, double score = 1.0) {
  return {video, center, length, score};
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("mespot_test_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace mespot::testing
