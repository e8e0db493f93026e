#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "mespot/types.hpp"

namespace mespot {

struct SpotterConfig {
  int window_length = 35;  // L
  int half_window = 17;    // h
  int lbp_grid = 6;
  int lbp_neighbors = 8;
  int lbp_radius = 1;
  double peak_fraction = 0.5;  // p in T = mean + p (max - mean)
  int mdmd_offset = 0;         // k; 0 selects floor(L / 2)
  int mdmd_bins = 8;
  int mdmd_search_radius = 3;
  int landmark_window = 0;     // 0 selects L
  bool apply_nms = true;

  int effective_mdmd_offset() const { return mdmd_offset > 0 ? mdmd_offset : window_length / 2; }
  int effective_landmark_window() const { return landmark_window > 0 ? landmark_window : window_length; }

  /// Throws ErrorKind::Configuration on out-of-range values.
  void validate() const;
};

/// Per-frame spotting score, same length as the video; margins hold 0.
struct ScoreCurve {
  std::string video_id;
  std::vector<double> values;
};

struct Peak {
  int frame = 0;
  double score = 0.0;

  friend bool operator==(const Peak&, const Peak&) = default;
};

/// Contrast of each window centre against the mean of the window's head and
/// tail frames, summed over the LBP block grid with the chi-square distance.
/// Throws ErrorKind::SequenceTooShort unless frame count > L.
ScoreCurve chi2_contrast_curve(const FrameSequence& seq, const SpotterConfig& cfg);

/// Local maxima strictly above T = mean + p (max - mean) that dominate their
/// +-floor(L/2) neighbourhood. On a plateau the leftmost frame wins.
std::vector<Peak> threshold_peaks(const ScoreCurve& curve, const SpotterConfig& cfg);

/// Keeps detections in descending score order (ties: lower centre) whose centre
/// is at least `spacing` frames from every kept centre. Output sorted by centre.
std::vector<Detection> nms(std::span<const Detection> dets, int spacing);

/// Peaks -> fixed-length detections (length L), followed by NMS when enabled.
std::vector<Detection> peaks_to_detections(const std::string& video_id, std::span<const Peak> peaks,
                                           const SpotterConfig& cfg);

std::vector<Detection> spot_lbp_chi2(const FrameSequence& seq, const SpotterConfig& cfg);

// --- main directional maximal difference -----------------------------------

struct MotionVector {
  int dx = 0;
  int dy = 0;
};

/// One displacement per grid block, found by exhaustive SAD block matching of
/// `from` against `to` within +-radius pixels. Block-major order.
std::vector<MotionVector> block_motion_field(const Raster& from, const Raster& to, int grid, int radius);

/// Direction bin of a non-zero vector; bin 0 is centred on +x.
int direction_bin(const MotionVector& v, int bins);

/// Most populated direction bin among non-zero vectors (lowest on ties), or
/// -1 when every vector is zero.
int main_direction(std::span<const MotionVector> field, int bins);

/// Mean of the largest third of magnitudes in the main direction; 0 when static.
double main_direction_magnitude(std::span<const MotionVector> field, int bins);

/// score_i = max(0, M(i-k, i) - M(i-k, i+k)) with M the main-direction
/// magnitude. Throws ErrorKind::SequenceTooShort unless frame count > 2k.
ScoreCurve mdmd_curve(const FrameSequence& seq, const SpotterConfig& cfg);

std::vector<Detection> spot_mdmd(const FrameSequence& seq, const SpotterConfig& cfg);

// --- landmark distance ratios -----------------------------------------------

inline constexpr int kLandmarkRatioCount = 6;

/// Right/left brow-to-eye, right/left eye aperture, mouth width, mouth height.
std::array<double, kLandmarkRatioCount> landmark_distances(std::span<const Point2> points);

/// L2 deviation from 1 of the distance ratios between each window centre and
/// the window's first frame. Requires a dense 68-point track.
ScoreCurve landmark_curve(const LandmarkTrack& track, const SpotterConfig& cfg);

std::vector<Detection> spot_landmarks(const LandmarkTrack& track, const SpotterConfig& cfg);

// --- per-frame feature post-processing --------------------------------------

/// Row-major X x Y matrix, one row per frame.
struct FeatureMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
};

/// A_i = sum_j (F[i, j] - F[0, j])^2.
std::vector<double> difference_energy(const FeatureMatrix& features);

/// B_i = sum_{m = i-h}^{i+h-1} A_m for i in [h, X - h]; other entries are 0.
std::vector<double> windowed_sums(std::span<const double> energy, int h);

struct ApexResult {
  int apex = 0;
  double score = 0.0;
};

/// argmax of the windowed sums (lowest index on ties). Throws
/// ErrorKind::Argument unless X > 2h.
ApexResult feature_engineering_apex(const FeatureMatrix& features, int h);

}  // namespace mespot
