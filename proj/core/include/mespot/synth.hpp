#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mespot/types.hpp"

namespace mespot {

struct DistractorRates {
  double blink = 0.0;             // expected events per video
  double head_shift = 0.0;
  double macro_expression = 0.0;
};

struct FixtureConfig {
  std::uint64_t seed = 20240101;
  int videos = 4;
  int subjects = 2;
  int frames_per_video = 2200;
  double fps = 100.0;
  int mes_min = 0;
  int mes_max = 3;
  int me_length_min = 10;
  int me_length_max = 51;
  int separation = 35;            // minimum gap between any two events and from the ends
  double me_amplitude_min = 30.0; // peak intensity change of a micro-expression
  double me_amplitude_max = 45.0;
  double texture_amplitude = 6.0; // static per-video skin texture
  double noise_amplitude = 0.0;   // per-frame uniform sensor noise
  DistractorRates distractors;
  int width = 128;
  int height = 128;

  /// Throws ErrorKind::Configuration.
  void validate() const;

  static FixtureConfig clean_profile();
  static FixtureConfig distractor_profile();
};

enum class DistractorKind { Blink, HeadShift, MacroExpression };

std::string_view to_string(DistractorKind kind);

struct DistractorEvent {
  std::string video_id;
  DistractorKind kind = DistractorKind::Blink;
  int onset = 0;
  int offset = 0;
};

struct Fixture {
  DatasetManifest manifest;
  std::vector<FrameSequence> sequences;  // parallel to manifest.videos
  std::vector<LandmarkTrack> landmarks;  // dense 68-point tracks
  std::vector<DistractorEvent> distractors;
};

/// Face-like synthetic videos with injected micro-expressions (ground truth)
/// and optional distractors (logged separately). Each video draws from its
/// own stream derived from (seed, video index).
Fixture generate_fixture(const FixtureConfig& cfg);

/// Writes manifest.txt, frames/<video>.mesq, landmarks.csv and distractors.csv.
void write_fixture(const Fixture& fixture, const std::filesystem::path& dir);

inline constexpr std::string_view kDistractorHeader = "video_id,kind,onset,offset";
std::string write_distractors_text(const std::vector<DistractorEvent>& events);

}  // namespace mespot
