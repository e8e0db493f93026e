#include "mespot/align.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "mespot/error.hpp"
#include "mespot/landmarks.hpp"

namespace mespot {
namespace {

double twice_area(const std::array<Point2, 3>& p) {
  return (p[1].x - p[0].x) * (p[2].y - p[0].y) - (p[1].y - p[0].y) * (p[2].x - p[0].x);
}

void require_non_collinear(const std::array<Point2, 3>& p, const char* what) {
  double extent = 0.0;
  for (int i = 0; i < 3; ++i) {
    extent = std::max(extent, std::hypot(p[(i + 1) % 3].x - p[i].x, p[(i + 1) % 3].y - p[i].y));
  }
  if (!(extent > 0.0) || std::abs(twice_area(p)) <= 1e-9 * extent * extent) {
    fail(ErrorKind::Geometry, fmt::format("{} points are collinear", what));
  }
}

}  // namespace

Point2 SimilarityTransform::apply_inverse(Point2 p) const {
  const double det = a * a + b * b;
  const double x = p.x - tx;
  const double y = p.y - ty;
  return {(a * x + b * y) / det, (-b * x + a * y) / det};
}

SimilarityTransform estimate_similarity(const std::array<Point2, 3>& from, const std::array<Point2, 3>& to) {
  require_non_collinear(from, "registration");
  require_non_collinear(to, "template");

  Point2 mf, mt;
  for (int i = 0; i < 3; ++i) {
    mf.x += from[i].x / 3.0;
    mf.y += from[i].y / 3.0;
    mt.x += to[i].x / 3.0;
    mt.y += to[i].y / 3.0;
  }
  double dot = 0.0, cross = 0.0, norm = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double sx = from[i].x - mf.x, sy = from[i].y - mf.y;
    const double dx = to[i].x - mt.x, dy = to[i].y - mt.y;
    dot += sx * dx + sy * dy;
    cross += sx * dy - sy * dx;
    norm += sx * sx + sy * sy;
  }
  SimilarityTransform t;
  t.a = dot / norm;
  t.b = cross / norm;
  t.tx = mt.x - (t.a * mf.x - t.b * mf.y);
  t.ty = mt.y - (t.b * mf.x + t.a * mf.y);
  return t;
}

Raster warp_to_template(const Raster& frame, const SimilarityTransform& transform,
                        const AlignmentTemplate& tmpl) {
  Raster out(tmpl.width, tmpl.height, 0);
  auto sample = [&](int x, int y) -> double {
    if (x < 0 || y < 0 || x >= frame.width() || y >= frame.height()) return 0.0;
    return frame.at(x, y);
  };
  for (int v = 0; v < tmpl.height; ++v) {
    for (int u = 0; u < tmpl.width; ++u) {
      const Point2 s = transform.apply_inverse({static_cast<double>(u), static_cast<double>(v)});
      // Snap near-integer coordinates so pure translations copy pixels exactly.
      const double sx = std::abs(s.x - std::round(s.x)) < 1e-9 ? std::round(s.x) : s.x;
      const double sy = std::abs(s.y - std::round(s.y)) < 1e-9 ? std::round(s.y) : s.y;
      const int x0 = static_cast<int>(std::floor(sx));
      const int y0 = static_cast<int>(std::floor(sy));
      const double fx = sx - x0, fy = sy - y0;
      const double value = (1 - fx) * (1 - fy) * sample(x0, y0) + fx * (1 - fy) * sample(x0 + 1, y0) +
                           (1 - fx) * fy * sample(x0, y0 + 1) + fx * fy * sample(x0 + 1, y0 + 1);
      out.at(u, v) = static_cast<std::uint8_t>(std::clamp(std::lround(value), 0L, 255L));
    }
  }
  return out;
}

FrameSequence align_frames(const FrameSequence& seq, const LandmarkTrack& landmarks,
                           const AlignmentTemplate& tmpl, int refresh_every) {
  seq.validate();
  if (refresh_every < 1) fail(ErrorKind::Argument, "refresh interval M must be >= 1");
  if (tmpl.width <= 0 || tmpl.height <= 0) fail(ErrorKind::Argument, "template size must be positive");

  FrameSequence out;
  out.video_id = seq.video_id;
  out.width = tmpl.width;
  out.height = tmpl.height;
  out.fps = seq.fps;
  out.frames.reserve(seq.frames.size());

  SimilarityTransform transform;
  int governing = -1;
  for (int i = 0; i < seq.frame_count(); ++i) {
    const int g = (i / refresh_every) * refresh_every;
    if (g != governing) {
      const LandmarkFrame* lf = landmarks.find(g);
      if (!lf) {
        fail(ErrorKind::Coverage,
             fmt::format("video {} has no landmarks for frame {} (refresh every {})", seq.video_id, g,
                         refresh_every));
      }
      transform = estimate_similarity(registration_points(lf->points), tmpl.points);
      governing = g;
    }
    out.frames.push_back(warp_to_template(seq.frames[i], transform, tmpl));
  }
  return out;
}

}  // namespace mespot
