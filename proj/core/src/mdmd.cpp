#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>

#include "mespot/error.hpp"
#include "mespot/lbp.hpp"
#include "mespot/spotters.hpp"

namespace mespot {

std::vector<MotionVector> block_motion_field(const Raster& from, const Raster& to, int grid, int radius) {
  if (from.width() != to.width() || from.height() != to.height()) {
    fail(ErrorKind::Argument, "motion estimation needs equally sized frames");
  }
  const int w = from.width(), h = from.height();
  const auto xs = split_even(w, grid);
  const auto ys = split_even(h, grid);

  std::vector<MotionVector> field;
  field.reserve(static_cast<std::size_t>(grid) * grid);
  for (int by = 0; by < grid; ++by) {
    for (int bx = 0; bx < grid; ++bx) {
      const int x0 = xs[bx][0], x1 = xs[bx][1], y0 = ys[by][0], y1 = ys[by][1];
      MotionVector best;
      long long best_sad = std::numeric_limits<long long>::max();
      int best_norm = 0;
      // candidates reaching past the frame sample the replicated border
      for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
          long long sad = 0;
          for (int y = y0; y < y1 && sad <= best_sad; ++y) {
            const int ty = std::clamp(y + dy, 0, h - 1);
            for (int x = x0; x < x1; ++x) {
              sad += std::abs(int(from.at(x, y)) - int(to.at(std::clamp(x + dx, 0, w - 1), ty)));
            }
          }
          const int norm = dx * dx + dy * dy;
          if (sad < best_sad || (sad == best_sad && norm < best_norm)) {
            best_sad = sad;
            best_norm = norm;
            best = {dx, dy};
          }
        }
      }
      field.push_back(best);
    }
  }
  return field;
}

int direction_bin(const MotionVector& v, int bins) {
  const double two_pi = 2.0 * std::numbers::pi;
  const double width = two_pi / bins;
  double angle = std::atan2(static_cast<double>(v.dy), static_cast<double>(v.dx)) + width / 2.0;
  angle = std::fmod(angle + two_pi, two_pi);
  return std::min(bins - 1, static_cast<int>(angle / width));
}

int main_direction(std::span<const MotionVector> field, int bins) {
  std::vector<int> hist(bins, 0);
  bool any = false;
  for (const auto& v : field) {
    if (v.dx == 0 && v.dy == 0) continue;
    ++hist[direction_bin(v, bins)];
    any = true;
  }
  if (!any) return -1;
  return static_cast<int>(std::max_element(hist.begin(), hist.end()) - hist.begin());
}

double main_direction_magnitude(std::span<const MotionVector> field, int bins) {
  const int main = main_direction(field, bins);
  if (main < 0) return 0.0;
  std::vector<double> mags;
  for (const auto& v : field) {
    if ((v.dx != 0 || v.dy != 0) && direction_bin(v, bins) == main) mags.push_back(std::hypot(v.dx, v.dy));
  }
  std::sort(mags.begin(), mags.end(), std::greater<>());
  const std::size_t top = (mags.size() + 2) / 3;
  double sum = 0.0;
  for (std::size_t i = 0; i < top; ++i) sum += mags[i];
  return sum / static_cast<double>(top);
}

ScoreCurve mdmd_curve(const FrameSequence& seq, const SpotterConfig& cfg) {
  cfg.validate();
  seq.validate();
  const int n = seq.frame_count();
  const int k = cfg.effective_mdmd_offset();
  if (n <= 2 * k) {
    fail(ErrorKind::SequenceTooShort,
         fmt::format("video {} has {} frames; MDMD needs more than 2k = {}", seq.video_id, n, 2 * k));
  }
  auto magnitude = [&](int a, int b) {
    const auto field = block_motion_field(seq.frames[a], seq.frames[b], cfg.lbp_grid, cfg.mdmd_search_radius);
    return main_direction_magnitude(field, cfg.mdmd_bins);
  };
  ScoreCurve curve{seq.video_id, std::vector<double>(n, 0.0)};
  for (int i = k; i + k < n; ++i) {
    curve.values[i] = std::max(0.0, magnitude(i - k, i) - magnitude(i - k, i + k));
  }
  return curve;
}

std::vector<Detection> spot_mdmd(const FrameSequence& seq, const SpotterConfig& cfg) {
  const ScoreCurve curve = mdmd_curve(seq, cfg);
  const auto peaks = threshold_peaks(curve, cfg);
  return peaks_to_detections(seq.video_id, peaks, cfg);
}

}  // namespace mespot
