#pragma once

#include <array>

#include "mespot/types.hpp"

namespace mespot {

inline constexpr int kDefaultAlignmentRefresh = 30;

/// dst = [a -b; b a] * src + t
struct SimilarityTransform {
  double a = 1.0;
  double b = 0.0;
  double tx = 0.0;
  double ty = 0.0;

  Point2 apply(Point2 p) const { return {a * p.x - b * p.y + tx, b * p.x + a * p.y + ty}; }
  Point2 apply_inverse(Point2 p) const;
};

/// Least-squares similarity (rotation, uniform scale, translation) mapping
/// `from` onto `to`. Throws ErrorKind::Geometry if either triple is collinear.
SimilarityTransform estimate_similarity(const std::array<Point2, 3>& from, const std::array<Point2, 3>& to);

/// Warps `frame` so that the registration points land on the template points,
/// cropping to the template size. Bilinear sampling, zero outside the frame.
Raster warp_to_template(const Raster& frame, const SimilarityTransform& transform,
                        const AlignmentTemplate& tmpl);

/// Registers every frame. Frame i uses the landmarks of frame (i / M) * M, so
/// the transform changes at most once every M frames.
FrameSequence align_frames(const FrameSequence& seq, const LandmarkTrack& landmarks,
                           const AlignmentTemplate& tmpl = {},
                           int refresh_every = kDefaultAlignmentRefresh);

}  // namespace mespot
