#include "vinv/raster.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace vinv {

namespace {

constexpr Rgb kBackground{0, 0, 0};
constexpr Rgb kTumor{200, 60, 60};
constexpr Rgb kVessel{60, 110, 220};
constexpr Rgb kOverlap{230, 160, 40};
constexpr Rgb kContact{170, 60, 200};
constexpr Rgb kCentroid{255, 255, 255};

}  // namespace

void write_ppm(const RgbImage& img, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw VolumeError("cannot write image: " + path.string());
    out << "P6\n" << img.cols << ' ' << img.rows << "\n255\n";
    for (const Rgb& p : img.pixels) out.write(reinterpret_cast<const char*>(p.data()), 3);
    if (!out) throw VolumeError("failed writing image: " + path.string());
}

RgbImage contact_overlay(const SliceView& tumor, const SliceView& vessel,
                         const SliceInvolvement& involvement) {
    RgbImage img(tumor.rows, tumor.cols, kBackground);
    for (std::size_t r = 0; r < img.rows; ++r)
        for (std::size_t c = 0; c < img.cols; ++c) {
            const bool t = tumor.at(static_cast<int>(r), static_cast<int>(c));
            const bool v = vessel.at(static_cast<int>(r), static_cast<int>(c));
            if (t && v)
                img.at(r, c) = kOverlap;
            else if (t)
                img.at(r, c) = kTumor;
            else if (v)
                img.at(r, c) = kVessel;
        }
    for (const auto& cs : involvement.contacts) {
        for (const Pixel& p : cs.contacts)
            img.at(static_cast<std::size_t>(p.row), static_cast<std::size_t>(p.col)) = kContact;
        const auto r = static_cast<long>(std::lround(cs.centroid.row));
        const auto c = static_cast<long>(std::lround(cs.centroid.col));
        if (r >= 0 && c >= 0 && static_cast<std::size_t>(r) < img.rows &&
            static_cast<std::size_t>(c) < img.cols)
            img.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = kCentroid;
    }
    return img;
}

Rgb heat_color(double value) {
    if (!(value >= kHeatmapFloor)) return kBackground;
    const double t = std::clamp(value / kHeatmapMax, 0.0, 1.0);
    // blue -> cyan -> yellow -> red
    auto ch = [](double x) { return static_cast<std::uint8_t>(std::lround(std::clamp(x, 0.0, 1.0) * 255.0)); };
    if (t < 1.0 / 3.0) return {0, ch(3.0 * t), 255};
    if (t < 2.0 / 3.0) return {ch(3.0 * t - 1.0), 255, ch(2.0 - 3.0 * t)};
    return {255, ch(3.0 - 3.0 * t), 0};
}

RgbImage uncertainty_heatmap(std::span<const float> slice, std::size_t rows, std::size_t cols) {
    if (slice.size() != rows * cols) throw VolumeError("heat map slice size mismatch");
    RgbImage img(rows, cols, kBackground);
    for (std::size_t i = 0; i < slice.size(); ++i) img.pixels[i] = heat_color(slice[i]);
    return img;
}

}  // namespace vinv
