#pragma once

namespace mespot {

/// Inclusive, 0-based frame interval.
struct Interval {
  int onset = 0;
  int offset = 0;

  int length() const { return offset - onset + 1; }
  int center() const;

  friend bool operator==(const Interval&, const Interval&) = default;
};

struct CenterLength {
  int center = 0;
  int length = 1;

  friend bool operator==(const CenterLength&, const CenterLength&) = default;
};

/// length = offset - onset + 1, center = floor((onset + offset) / 2).
/// Throws ErrorKind::Argument when offset < onset.
CenterLength to_center_length(int onset, int offset);

/// Inverse: onset = center - floor((length - 1) / 2). Exact for odd lengths;
/// for even lengths the result re-converts to the same (center, length).
Interval from_center_length(int center, int length);

inline CenterLength to_center_length(const Interval& iv) {
  return to_center_length(iv.onset, iv.offset);
}

}  // namespace mespot
