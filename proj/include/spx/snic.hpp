#pragma once

#include <array>
#include <filesystem>
#include <vector>

#include "spx/media.hpp"

namespace spx {

struct RegionStats {
    double mean_x = 0.0;
    double mean_y = 0.0;
    std::array<double, 3> mean_color{};
    int size = 0;
};

// Per-pixel superpixel assignment. Region ids follow the raster order of the
// seed grid, so the same slot covers roughly the same area in every patch of
// a given size.
struct LabelMap {
    int width = 0;
    int height = 0;
    int k = 0;
    std::vector<int> labels;
    std::vector<RegionStats> regions;

    int at(int x, int y) const { return labels[static_cast<std::size_t>(y) * width + x]; }
};

struct SeedPoint {
    int x;
    int y;
};

// Exactly k distinct seed pixels laid out on a near-uniform grid, raster order.
std::vector<SeedPoint> seed_grid(int width, int height, int k);

// Simple non-iterative clustering over the patch RGB values. The distance
// from pixel p with color c to region r is
//   sqrt(|c - c_r|^2 + (compactness / step)^2 * |p - p_r|^2)
// with step = sqrt(width * height / k) and (c_r, p_r) the running centroid.
LabelMap segment(const Patch& patch, int k, double compactness);
LabelMap segment(const ImageRGB& rgb, int k, double compactness);

// Debug exports.
void write_label_map_png(const std::filesystem::path& path, const LabelMap& labels);
void write_boundary_overlay_png(const std::filesystem::path& path, const ImageRGB& rgb,
                                const LabelMap& labels);

} // namespace spx
