#include "mespot/interval.hpp"

#include <string>

#include "mespot/error.hpp"

namespace mespot {
namespace {

int floor_div2(int v) { return v >= 0 ? v / 2 : -((-v + 1) / 2); }

}  // namespace

int Interval::center() const { return floor_div2(onset + offset); }

CenterLength to_center_length(int onset, int offset) {
  if (offset < onset) {
    fail(ErrorKind::Argument, "interval offset " + std::to_string(offset) + " precedes onset " +
                                  std::to_string(onset));
  }
  return {floor_div2(onset + offset), offset - onset + 1};
}

Interval from_center_length(int center, int length) {
  if (length < 1) fail(ErrorKind::Argument, "interval length must be >= 1");
  const int onset = center - (length - 1) / 2;
  return {onset, onset + length - 1};
}

}  // namespace mespot
