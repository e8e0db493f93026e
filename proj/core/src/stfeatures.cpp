#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "mespot/error.hpp"
#include "mespot/lbp.hpp"
#include "mespot/stfeatures.hpp"

namespace mespot {

std::string_view to_string(StFeatureKind kind) {
  switch (kind) {
    case StFeatureKind::LbpTop: return "lbp-top";
    case StFeatureKind::HogTop: return "hog-top";
    case StFeatureKind::HigoTop: return "higo-top";
  }
  return "?";
}

StFeatureKind parse_st_feature_kind(std::string_view name) {
  if (name == "lbp-top") return StFeatureKind::LbpTop;
  if (name == "hog-top") return StFeatureKind::HogTop;
  if (name == "higo-top") return StFeatureKind::HigoTop;
  fail(ErrorKind::Configuration, fmt::format("unknown feature kind '{}'", name));
}

int StFeatureConfig::bins_per_plane() const { return kind == StFeatureKind::LbpTop ? kUniformLbpBins : bins; }

std::size_t StFeatureConfig::feature_length() const {
  return static_cast<std::size_t>(blocks_x) * blocks_y * blocks_t * 3 * bins_per_plane();
}

void StFeatureConfig::validate() const {
  auto bad = [](const std::string& msg) { fail(ErrorKind::Configuration, msg); };
  if (blocks_x < 1 || blocks_y < 1 || blocks_t < 1) bad("block divisions must be >= 1");
  if (!(overlap >= 0.0 && overlap < 1.0)) bad("block overlap must lie in [0, 1)");
  if (bins < 1) bad("orientation bins must be >= 1");
  if (window_length < 3) bad("window length must be >= 3");
  if (scales.empty()) bad("at least one scale is required");
  for (const double s : scales) {
    if (!(s > 0.0 && s <= 1.0)) bad(fmt::format("scale {} outside (0, 1]", s));
  }
}

std::vector<std::array<int, 2>> overlapping_blocks(int n, int parts, double overlap) {
  if (parts < 1 || n < parts) {
    fail(ErrorKind::Argument, fmt::format("cannot place {} blocks along {} cells", parts, n));
  }
  const double size = n / (parts - (parts - 1) * overlap);
  const double stride = size * (1.0 - overlap);
  std::vector<std::array<int, 2>> out(parts);
  for (int k = 0; k < parts; ++k) {
    int begin = static_cast<int>(std::lround(k * stride));
    int end = k + 1 == parts ? n : static_cast<int>(std::lround(k * stride + size));
    begin = std::clamp(begin, 0, n - 1);
    end = std::clamp(end, begin + 1, n);
    out[k] = {begin, end};
  }
  return out;
}

namespace {

// Orientation bin of every integer gradient pair (8-bit images give
// components in [-255, 255]); -1 for the zero gradient.
class OrientationTable {
 public:
  static constexpr int kSpan = 511;

  explicit OrientationTable(int bins) : bin_(kSpan * kSpan) {
    const double pi = std::numbers::pi;
    for (int gv = -255; gv <= 255; ++gv) {
      for (int gu = -255; gu <= 255; ++gu) {
        if (gu == 0 && gv == 0) {
          bin_[index(gu, gv)] = -1;
          continue;
        }
        double theta = std::atan2(static_cast<double>(gv), static_cast<double>(gu));
        if (theta < 0.0) theta += pi;
        if (theta >= pi) theta -= pi;
        bin_[index(gu, gv)] = static_cast<std::int8_t>(std::min(bins - 1, static_cast<int>(theta / (pi / bins))));
      }
    }
  }

  int operator()(int gu, int gv) const { return bin_[index(gu, gv)]; }

 private:
  static std::size_t index(int gu, int gv) { return static_cast<std::size_t>(gv + 255) * kSpan + (gu + 255); }
  std::vector<std::int8_t> bin_;
};

const OrientationTable& orientation_table(int bins) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<OrientationTable>> tables;
  std::lock_guard lock(mutex);
  auto& slot = tables[bins];
  if (!slot) slot = std::make_unique<OrientationTable>(bins);
  return *slot;
}

// Blocks containing each coordinate of one axis, CSR layout.
struct Membership {
  std::vector<int> first;  // size n + 1
  std::vector<int> block;

  Membership(int n, const std::vector<std::array<int, 2>>& blocks) : first(n + 1, 0) {
    for (int c = 0; c < n; ++c) {
      first[c] = static_cast<int>(block.size());
      for (int k = 0; k < static_cast<int>(blocks.size()); ++k) {
        if (c >= blocks[k][0] && c < blocks[k][1]) block.push_back(k);
      }
    }
    first[n] = static_cast<int>(block.size());
  }
};

// Plane axes (u, v): XY -> (x, y), XT -> (x, t), YT -> (y, t).
enum Plane { kXY = 0, kXT = 1, kYT = 2 };

struct Offset {
  int dt;
  std::ptrdiff_t d;  // within-frame pixel offset
};

Offset plane_offset(Plane plane, int du, int dv, int w) {
  switch (plane) {
    case kXY: return {0, du + static_cast<std::ptrdiff_t>(dv) * w};
    case kXT: return {dv, du};
    case kYT: return {dv, static_cast<std::ptrdiff_t>(du) * w};
  }
  return {0, 0};
}

}  // namespace

std::vector<double> extract_st_feature(std::span<const Raster> volume, const StFeatureConfig& cfg) {
  cfg.validate();
  if (volume.empty()) fail(ErrorKind::Argument, "empty feature volume");
  const int w = volume.front().width(), h = volume.front().height();
  for (const auto& f : volume) {
    if (f.width() != w || f.height() != h) fail(ErrorKind::Argument, "feature volume frames differ in size");
  }
  const int t_len = static_cast<int>(volume.size());
  if (t_len < std::max(3, cfg.blocks_t) || w < std::max(3, cfg.blocks_x) || h < std::max(3, cfg.blocks_y)) {
    fail(ErrorKind::Argument, fmt::format("{}x{}x{} volume is too small for {}x{}x{} blocks", w, h, t_len,
                                          cfg.blocks_x, cfg.blocks_y, cfg.blocks_t));
  }
  if (cfg.kind != StFeatureKind::LbpTop && cfg.bins > 127) {
    fail(ErrorKind::Configuration, "at most 127 orientation bins");
  }

  const Membership mx(w, overlapping_blocks(w, cfg.blocks_x, cfg.overlap));
  const Membership my(h, overlapping_blocks(h, cfg.blocks_y, cfg.overlap));
  const Membership mt(t_len, overlapping_blocks(t_len, cfg.blocks_t, cfg.overlap));
  const int nb = cfg.bins_per_plane();
  const bool lbp = cfg.kind == StFeatureKind::LbpTop;
  const bool magnitude = cfg.kind == StFeatureKind::HogTop;
  const auto& lbp_table = uniform_lbp_table();
  const OrientationTable* orient = lbp ? nullptr : &orientation_table(cfg.bins);

  std::vector<const std::uint8_t*> frame(t_len);
  for (int t = 0; t < t_len; ++t) frame[t] = volume[t].pixels().data();

  // histogram of (block, plane) starts at ((bt * by_n + by) * bx_n + bx) * 3 + plane, times nb
  std::vector<double> feature(cfg.feature_length(), 0.0);
  auto hist_base = [&](int bt, int by, int bx, int plane) {
    return ((static_cast<std::size_t>(bt) * cfg.blocks_y + by) * cfg.blocks_x + bx) * 3 * nb +
           static_cast<std::size_t>(plane) * nb;
  };

  for (int p = 0; p < 3; ++p) {
    const Plane plane = static_cast<Plane>(p);
    std::array<Offset, 8> nbr{};
    for (int k = 0; k < 8; ++k) nbr[k] = plane_offset(plane, kLbpNeighbours[k][0], kLbpNeighbours[k][1], w);
    const Offset u_plus = plane_offset(plane, 1, 0, w), u_minus = plane_offset(plane, -1, 0, w);
    const Offset v_plus = plane_offset(plane, 0, 1, w), v_minus = plane_offset(plane, 0, -1, w);

    const bool x_inner = plane == kXY || plane == kXT;
    const bool y_inner = plane == kXY || plane == kYT;
    const bool t_inner = plane == kXT || plane == kYT;
    const int t0 = t_inner ? 1 : 0, t1 = t_inner ? t_len - 1 : t_len;
    const int y0 = y_inner ? 1 : 0, y1 = y_inner ? h - 1 : h;
    const int x0 = x_inner ? 1 : 0, x1 = x_inner ? w - 1 : w;

    std::vector<std::size_t> bases;  // histogram offsets of the (bt, by) blocks of the current row
    for (int t = t0; t < t1; ++t) {
      for (int y = y0; y < y1; ++y) {
        const std::ptrdiff_t row = static_cast<std::ptrdiff_t>(y) * w;
        auto row_ptr = [&](const Offset& o) { return frame[t + o.dt] + row + o.d; };
        const std::uint8_t* centre = frame[t] + row;
        std::array<const std::uint8_t*, 8> n{};
        for (int k = 0; k < 8; ++k) n[k] = row_ptr(nbr[k]);
        const std::uint8_t* up = row_ptr(u_plus);
        const std::uint8_t* um = row_ptr(u_minus);
        const std::uint8_t* vp = row_ptr(v_plus);
        const std::uint8_t* vm = row_ptr(v_minus);
        bases.clear();
        for (int i = mt.first[t]; i < mt.first[t + 1]; ++i) {
          for (int j = my.first[y]; j < my.first[y + 1]; ++j) bases.push_back(hist_base(mt.block[i], my.block[j], 0, p));
        }
        const std::size_t bx_stride = static_cast<std::size_t>(3) * nb;

        for (int x = x0; x < x1; ++x) {
          int bin;
          double weight = 1.0;
          if (lbp) {
            const int c = centre[x];
            unsigned code = 0;
            for (int k = 0; k < 8; ++k) code |= static_cast<unsigned>(n[k][x] >= c) << k;
            bin = lbp_table[code];
          } else {
            const int gu = up[x] - um[x];
            const int gv = vp[x] - vm[x];
            bin = (*orient)(gu, gv);
            if (bin < 0) continue;
            if (magnitude) weight = std::sqrt(static_cast<double>(gu * gu + gv * gv));
          }
          for (const std::size_t base : bases) {
            for (int k = mx.first[x]; k < mx.first[x + 1]; ++k) {
              feature[base + mx.block[k] * bx_stride + bin] += weight;
            }
          }
        }
      }
    }
  }

  for (std::size_t off = 0; off < feature.size(); off += nb) {
    double total = 0.0;
    for (int b = 0; b < nb; ++b) total += feature[off + b];
    if (total > 0.0) {
      for (int b = 0; b < nb; ++b) feature[off + b] /= total;
    }
  }
  return feature;
}

}  // namespace mespot
