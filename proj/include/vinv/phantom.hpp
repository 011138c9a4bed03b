#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vinv/evaluation.hpp"
#include "vinv/involvement.hpp"
#include "vinv/uncertainty.hpp"
#include "vinv/volume.hpp"

namespace vinv {

class PhantomError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Axis-aligned ellipsoid standing in for the pancreas.
struct Blob {
    double z = 0.0, row = 0.0, col = 0.0;
    double rz = 1.0, rrow = 1.0, rcol = 1.0;
};

/// A straight vessel tube along z wrapped by a tumor sector hugging its rim.
struct PhantomSpec {
    Dims dims{20, 128, 128};
    Spacing spacing{1.0, 1.0, 1.0};
    VesselKind vessel = VesselKind::Vein;
    int center_row = 64;
    int center_col = 64;
    int radius = 8;                 // pixels, >= 2
    double wrap_center_deg = 90.0;  // same convention as pixel_angle
    double span_deg = 180.0;        // [0, 360]
    int thickness = 3;              // radial tumor thickness outside the rim, pixels
    std::size_t z_begin = 0;        // tumor slices [z_begin, z_end)
    std::size_t z_end = 20;
    std::optional<Blob> pancreas;
    /// Extra angular extent (per side) carried only by the uncertain band in
    /// gen_uncertainty_scene.
    double band_deg = 0.0;
};

struct PhantomTruth {
    std::vector<double> slice_span;  // analytic span per slice, degrees
    double max_span = 0.0;
    bool presence = false;
    DpcgCategory category = DpcgCategory::Resectable;
};

void validate(const PhantomSpec& spec);

/// Filled disk from the midpoint-circle boundary, one row span per scanline.
void rasterize_disk(std::span<std::uint8_t> slice, std::size_t rows, std::size_t cols,
                    int center_row, int center_col, int radius);

/// Sets pixels in the annulus (radius, radius + thickness] whose angle around
/// the centre lies on the arc [start_deg, start_deg + extent_deg]. Pixels
/// next to the disk touch only the rim run whose angular extent best matches
/// `extent_deg`, so the 8-neighbour contact set spans the arc to within the
/// rim quantisation.
void rasterize_wrap(std::span<std::uint8_t> slice, std::size_t rows, std::size_t cols,
                    int center_row, int center_col, int radius, int thickness,
                    double start_deg, double extent_deg);

/// Scene with six base channels; only the wrapped vessel, tumor and optional
/// pancreas are populated.
std::pair<MaskVolume, PhantomTruth> gen_wrap_scene(const PhantomSpec& spec);

struct ConfusionScene {
    std::string id;
    MaskVolume pred;
    MaskVolume gt;
    Confusion artery = Confusion::TN;
    Confusion vein = Confusion::TN;
    Confusion scan = Confusion::TN;
};

/// `count` scene pairs cycling through every (pred, GT) presence combination
/// for artery and vein; geometry is drawn from `seed`.
std::vector<ConfusionScene> gen_confusion_suite(std::uint64_t seed, std::size_t count = 20);

struct UncertaintyScene {
    FoldSet folds;
    std::vector<double> ks;
    std::vector<PhantomTruth> truth;  // one per k
};

/// Three deterministic folds that agree on the vessel and the core tumor arc
/// (spec.span_deg) and disagree only on a band extending the arc by
/// spec.band_deg on each side. The band enters the mask exactly when
/// mean + k * std >= threshold.
UncertaintyScene gen_uncertainty_scene(const PhantomSpec& spec,
                                       std::vector<double> ks = kDefaultSigmaSteps,
                                       double threshold = kDefaultMaskThreshold);

/// Band fold values: mean 0.3, population std ~0.163, so the band is
/// excluded for k <= 1 and included for k >= 2 at threshold 0.5.
inline constexpr std::array<float, 3> kBandFoldValues{0.1f, 0.3f, 0.5f};

}  // namespace vinv
