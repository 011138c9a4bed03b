#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "vinv/volume.hpp"

namespace vinv {

class InvolvementError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Pixel {
    int row = 0;
    int col = 0;
    auto operator<=>(const Pixel&) const = default;
};

struct PointF {
    double row = 0.0;
    double col = 0.0;
};

/// Non-owning view of one binary axial slice, row-major.
struct SliceView {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::span<const std::uint8_t> pixels;

    bool at(int r, int c) const {
        return r >= 0 && c >= 0 && static_cast<std::size_t>(r) < rows &&
               static_cast<std::size_t>(c) < cols &&
               pixels[static_cast<std::size_t>(r) * cols + static_cast<std::size_t>(c)] != 0;
    }
};

SliceView slice_of(std::span<const std::uint8_t> channel, const Dims& dims, std::size_t z);

enum class Connectivity { Four = 4, Eight = 8 };

enum class SpanMethod {
    LargestGap,  // 360 minus the largest empty arc; handles arcs across 0 deg
    MinMax,      // literal max - min of the angle set
};

std::string_view to_string(SpanMethod m);
std::string_view to_string(Connectivity c);

struct InvolvementOptions {
    Connectivity connectivity = Connectivity::Eight;
    SpanMethod span_method = SpanMethod::LargestGap;
};

struct Component2D {
    std::size_t z = 0;
    std::vector<Pixel> pixels;  // sorted by (row, col)
    Connectivity connectivity = Connectivity::Eight;
};

struct ContactSet {
    std::size_t z = 0;
    std::size_t component = 0;   // index into the slice's component list
    std::vector<Pixel> contacts; // sorted by (row, col)
    PointF centroid;
    std::vector<double> angles;  // degrees in [0,360), zero-radius contacts skipped
};

struct SliceInvolvement {
    std::size_t z = 0;
    std::vector<double> spans;  // one per vessel component, degrees
    std::vector<ContactSet> contacts;
    double max_span = 0.0;
    bool presence = false;
};

enum class VesselKind { Artery, Vein };

std::string_view to_string(VesselKind k);
ChannelId channel_for(VesselKind k);

struct InvolvementReport {
    VesselKind vessel = VesselKind::Vein;
    std::vector<SliceInvolvement> slices;
    double max_span = 0.0;
    std::optional<std::size_t> argmax_slice;
    bool presence = false;
};

enum class DpcgCategory { Resectable = 0, BorderlineResectable = 1, Irresectable = 2 };

std::string_view to_string(DpcgCategory c);

/// Components ordered by their smallest (row, col) pixel.
std::vector<Component2D> connected_components(const SliceView& mask,
                                              Connectivity connectivity = Connectivity::Eight,
                                              std::size_t z = 0);

/// Vessel pixels that are tumor themselves or have a tumor pixel in their
/// neighbourhood (8-neighbourhood by default).
ContactSet contact_pixels(const SliceView& tumor, const Component2D& vessel,
                          Connectivity neighbourhood = Connectivity::Eight);

/// atan2 angle of `pixel` around `centroid` in degrees [0,360): 0 points to
/// increasing column, 90 to decreasing row (image up).
double pixel_angle(PointF centroid, Pixel pixel);

double angular_span(std::span<const double> angles,
                    SpanMethod method = SpanMethod::LargestGap);

SliceInvolvement slice_involvement(const SliceView& tumor, const SliceView& vessel,
                                   const InvolvementOptions& opts = {}, std::size_t z = 0);

InvolvementReport scan_involvement(const MaskVolume& masks, VesselKind vessel,
                                   const InvolvementOptions& opts = {});

enum class FilterMode { Voxel, Component };

std::string_view to_string(FilterMode m);

/// Drops vessel voxels inside the pancreas (Voxel), or whole 26-connected
/// vessel components touching the pancreas (Component).
std::vector<std::uint8_t> filter_critical(std::span<const std::uint8_t> vessel,
                                          std::span<const std::uint8_t> pancreas,
                                          const Dims& dims, FilterMode mode = FilterMode::Voxel);

/// Copy of `masks` with the artery and vein channels filtered against the
/// pancreas channel.
MaskVolume filter_critical(const MaskVolume& masks, FilterMode mode = FilterMode::Voxel);

DpcgCategory venous_category(double degrees);
DpcgCategory arterial_category(double degrees);
DpcgCategory dpcg_classify(double vein_degrees, double artery_degrees);

}  // namespace vinv
