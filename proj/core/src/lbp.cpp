#include "mespot/lbp.hpp"

#include <fmt/format.h>

#include "mespot/error.hpp"

namespace mespot {
namespace {

std::array<std::uint8_t, 256> build_uniform_table() {
  std::array<std::uint8_t, 256> table{};
  std::uint8_t next = 0;
  for (int code = 0; code < 256; ++code) {
    int transitions = 0;
    for (int b = 0; b < 8; ++b) {
      transitions += ((code >> b) & 1) != ((code >> ((b + 1) % 8)) & 1);
    }
    table[code] = transitions <= 2 ? next++ : static_cast<std::uint8_t>(kUniformLbpBins - 1);
  }
  return table;
}

}  // namespace

const std::array<std::uint8_t, 256>& uniform_lbp_table() {
  static const std::array<std::uint8_t, 256> table = build_uniform_table();
  return table;
}

std::uint8_t lbp_code(const Raster& r, int x, int y) {
  const std::uint8_t c = r.at(x, y);
  std::uint8_t code = 0;
  for (int p = 0; p < 8; ++p) {
    if (r.at(x + kLbpNeighbours[p][0], y + kLbpNeighbours[p][1]) >= c) code |= static_cast<std::uint8_t>(1u << p);
  }
  return code;
}

std::vector<std::uint8_t> lbp_code_image(const Raster& r) {
  const int w = r.width() - 2, h = r.height() - 2;
  if (w <= 0 || h <= 0) return {};
  std::vector<std::uint8_t> codes(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) codes[static_cast<std::size_t>(y) * w + x] = lbp_code(r, x + 1, y + 1);
  }
  return codes;
}

std::vector<std::array<int, 2>> split_even(int n, int parts) {
  if (parts < 1 || n < parts) {
    fail(ErrorKind::Argument, fmt::format("cannot split {} cells into {} blocks", n, parts));
  }
  const int size = n / parts;
  std::vector<std::array<int, 2>> out(parts);
  for (int k = 0; k < parts; ++k) out[k] = {k * size, k + 1 == parts ? n : (k + 1) * size};
  return out;
}

std::vector<double> lbp_block_histograms(const Raster& r, int grid) {
  const int w = r.width() - 2, h = r.height() - 2;
  if (grid < 1 || w < grid || h < grid) {
    fail(ErrorKind::Argument,
         fmt::format("{}x{} frame is too small for a {}x{} LBP grid", r.width(), r.height(), grid, grid));
  }
  const auto codes = lbp_code_image(r);
  const auto& table = uniform_lbp_table();
  const auto xs = split_even(w, grid);
  const auto ys = split_even(h, grid);

  std::vector<double> hist(static_cast<std::size_t>(grid) * grid * kUniformLbpBins, 0.0);
  for (int by = 0; by < grid; ++by) {
    for (int bx = 0; bx < grid; ++bx) {
      double* block = hist.data() + (static_cast<std::size_t>(by) * grid + bx) * kUniformLbpBins;
      int count = 0;
      for (int y = ys[by][0]; y < ys[by][1]; ++y) {
        for (int x = xs[bx][0]; x < xs[bx][1]; ++x) {
          block[table[codes[static_cast<std::size_t>(y) * w + x]]] += 1.0;
          ++count;
        }
      }
      for (int b = 0; b < kUniformLbpBins; ++b) block[b] /= count;
    }
  }
  return hist;
}

double chi2_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) fail(ErrorKind::Argument, "chi-square operands differ in length");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double s = a[i] + b[i];
    if (s != 0.0) {
      const double d = a[i] - b[i];
      sum += d * d / s;
    }
  }
  return sum;
}

}  // namespace mespot
