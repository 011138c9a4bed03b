#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "vinv/involvement.hpp"
#include "vinv/volume.hpp"

namespace vinv {

using Rgb = std::array<std::uint8_t, 3>;

struct RgbImage {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<Rgb> pixels;

    RgbImage(std::size_t r, std::size_t c, Rgb fill = {0, 0, 0})
        : rows(r), cols(c), pixels(r * c, fill) {}
    Rgb& at(std::size_t r, std::size_t c) { return pixels[r * cols + c]; }
    const Rgb& at(std::size_t r, std::size_t c) const { return pixels[r * cols + c]; }
};

/// Binary portable pixmap (P6).
void write_ppm(const RgbImage& img, const std::filesystem::path& path);

/// Tumor, vessel, contact pixels and component centroids of one slice.
RgbImage contact_overlay(const SliceView& tumor, const SliceView& vessel,
                         const SliceInvolvement& involvement);

inline constexpr double kHeatmapMax = 0.5;
inline constexpr double kHeatmapFloor = 0.01;

/// Uncertainty heat map on a fixed 0..kHeatmapMax scale; values below
/// kHeatmapFloor are drawn as background.
RgbImage uncertainty_heatmap(std::span<const float> slice, std::size_t rows, std::size_t cols);

Rgb heat_color(double value);

}  // namespace vinv
