#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "mespot/types.hpp"

namespace mespot {

inline constexpr int kUniformLbpBins = 59;

/// Maps an 8-neighbour LBP code to its uniform bin: the 58 codes with at most
/// two circular 0/1 transitions get bins 0..57 in ascending code order, every
/// other code shares bin 58.
const std::array<std::uint8_t, 256>& uniform_lbp_table();

/// Neighbour offsets (dx, dy) at radius 1, bit p set when neighbour p >= centre.
/// Starts east and walks counter-clockwise in image coordinates (y down).
inline constexpr std::array<std::array<int, 2>, 8> kLbpNeighbours{
    {{1, 0}, {1, -1}, {0, -1}, {-1, -1}, {-1, 0}, {-1, 1}, {0, 1}, {1, 1}}};

std::uint8_t lbp_code(const Raster& r, int x, int y);

/// Codes of all interior pixels, (w - 2) x (h - 2), row-major.
std::vector<std::uint8_t> lbp_code_image(const Raster& r);

/// Half-open [begin, end) ranges splitting n cells into `parts` near-equal
/// blocks; the trailing remainder goes to the last block.
std::vector<std::array<int, 2>> split_even(int n, int parts);

/// grid x grid L1-normalised uniform-LBP histograms over the interior pixels,
/// block-major (row of blocks, then column), kUniformLbpBins values each.
/// Throws ErrorKind::Argument when the interior is smaller than the grid.
std::vector<double> lbp_block_histograms(const Raster& r, int grid);

/// sum_i (a_i - b_i)^2 / (a_i + b_i), terms with a_i + b_i == 0 contribute 0.
double chi2_distance(std::span<const double> a, std::span<const double> b);

}  // namespace mespot
