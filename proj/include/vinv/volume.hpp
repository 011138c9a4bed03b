#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace vinv {

class VolumeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A required channel is absent from a volume.
class MissingChannelError : public VolumeError {
public:
    using VolumeError::VolumeError;
};

/// Anatomical structure channels. The integer values are stable and double
/// as the layered label value minus one for the six base structures.
enum class ChannelId : std::uint8_t {
    Pancreas = 0,
    CommonBileDuct = 1,
    PancreaticDuct = 2,
    Artery = 3,
    Vein = 4,
    Tumor = 5,
    TumorArtery = 6,
    TumorVein = 7,
};

inline constexpr std::array<ChannelId, 6> kBaseChannels{
    ChannelId::Pancreas, ChannelId::CommonBileDuct, ChannelId::PancreaticDuct,
    ChannelId::Artery,   ChannelId::Vein,           ChannelId::Tumor};

std::string_view channel_name(ChannelId id);
std::optional<ChannelId> channel_from_name(std::string_view name);

struct Spacing {
    double z_mm = 1.0;
    double y_mm = 1.0;
    double x_mm = 1.0;

    bool valid() const;
    bool operator==(const Spacing&) const = default;
};

/// Target spacing used for preparation unless configured otherwise.
inline constexpr Spacing kDefaultTargetSpacing{1.0, 0.67, 0.67};

/// Default crop extent in voxels (z, y, x).
inline constexpr std::array<std::size_t, 3> kDefaultCropSize{64, 128, 128};

struct Dims {
    std::size_t z = 0;
    std::size_t y = 0;
    std::size_t x = 0;

    std::size_t voxels() const { return z * y * x; }
    std::size_t slice_size() const { return y * x; }
    std::size_t index(std::size_t zi, std::size_t yi, std::size_t xi) const {
        return (zi * y + yi) * x + xi;
    }
    bool operator==(const Dims&) const = default;
};

struct VoxelCoord {
    std::ptrdiff_t z = 0;
    std::ptrdiff_t y = 0;
    std::ptrdiff_t x = 0;
};

/// Zero padding applied by crop_around, per axis (z, y, x).
struct CropPadding {
    std::array<std::size_t, 3> before{};
    std::array<std::size_t, 3> after{};
    bool operator==(const CropPadding&) const = default;
};

/// Multi-channel voxel grid. Channels are independent layers and may overlap:
/// a voxel may belong to tumor and vein at the same time.
/// Storage is channel-major, then z, y, x.
template <typename T>
class ChannelVolume {
public:
    using value_type = T;

    ChannelVolume() = default;
    ChannelVolume(Dims dims, std::vector<ChannelId> channels, Spacing spacing);
    ChannelVolume(Dims dims, std::vector<ChannelId> channels, Spacing spacing,
                  std::vector<T> data);

    const Dims& dims() const { return dims_; }
    const Spacing& spacing() const { return spacing_; }
    const std::vector<ChannelId>& channels() const { return channels_; }
    std::size_t channel_count() const { return channels_.size(); }

    std::optional<std::size_t> channel_index(ChannelId id) const;
    bool has_channel(ChannelId id) const { return channel_index(id).has_value(); }

    /// Throws VolumeError when the channel is absent.
    std::span<const T> channel(ChannelId id) const;
    std::span<T> channel(ChannelId id);
    std::span<const T> channel_at(std::size_t index) const;
    std::span<T> channel_at(std::size_t index);

    const std::vector<T>& data() const { return data_; }
    std::vector<T>& data() { return data_; }

    T at(std::size_t c, std::size_t z, std::size_t y, std::size_t x) const {
        return data_[c * dims_.voxels() + dims_.index(z, y, x)];
    }
    T& at(std::size_t c, std::size_t z, std::size_t y, std::size_t x) {
        return data_[c * dims_.voxels() + dims_.index(z, y, x)];
    }

    const std::optional<CropPadding>& padding() const { return padding_; }
    void set_padding(CropPadding p) { padding_ = p; }

    bool operator==(const ChannelVolume&) const = default;

private:
    void validate() const;

    Dims dims_;
    std::vector<ChannelId> channels_;
    Spacing spacing_;
    std::vector<T> data_;
    std::optional<CropPadding> padding_;
};

/// Binary masks, values in {0,1}.
using MaskVolume = ChannelVolume<std::uint8_t>;
/// Sigmoid probabilities, values in [0,1].
using ProbVolume = ChannelVolume<float>;

/// Single-channel layered labels: 0 background, 1..6 = ChannelId + 1,
/// 7 = tumor overlapping artery, 8 = tumor overlapping vein.
struct LayeredLabelVolume {
    Dims dims;
    Spacing spacing;
    std::vector<std::uint8_t> labels;
    std::optional<CropPadding> padding;

    bool operator==(const LayeredLabelVolume&) const = default;
};

using AnyVolume = std::variant<MaskVolume, ProbVolume, LayeredLabelVolume>;

extern template class ChannelVolume<std::uint8_t>;
extern template class ChannelVolume<float>;

// --- file format -----------------------------------------------------------
//
// A volume is a JSON header plus a sibling little-endian raw payload with the
// same stem and a ".raw" extension. Header keys:
//   format      "vinv-volume"
//   version     1
//   dims        [Z, H, W]
//   channels    channel names; the single name "label" marks layered labels
//   spacing_mm  [z, y, x]
//   dtype       "u8" | "f32"
//   order       "channel-major,z,y,x"
//   padding     optional {"before": [z,y,x], "after": [z,y,x]}

inline constexpr std::string_view kLabelChannelName = "label";
inline constexpr float kProbabilityIngestTolerance = 0.001f;

std::filesystem::path raw_path_for(const std::filesystem::path& header);

AnyVolume read_volume(const std::filesystem::path& header);
MaskVolume read_mask(const std::filesystem::path& header);
ProbVolume read_prob(const std::filesystem::path& header);

/// Reads a mask or layered-label file and returns multi-channel masks,
/// decoding layered labels on the way.
MaskVolume read_masks_any(const std::filesystem::path& header);

void write_volume(const MaskVolume& v, const std::filesystem::path& header);
void write_volume(const ProbVolume& v, const std::filesystem::path& header);
void write_volume(const LayeredLabelVolume& v, const std::filesystem::path& header);
void write_volume(const AnyVolume& v, const std::filesystem::path& header);

// --- label layering ----------------------------------------------------------

MaskVolume decode_layered(const LayeredLabelVolume& lv);

/// Inverse of decode_layered under the priority tumor > vein > artery >
/// pancreatic duct > common bile duct > pancreas; tumor on artery gives 7,
/// tumor on vein gives 8 (vein wins when tumor overlaps both).
LayeredLabelVolume encode_layered(const MaskVolume& masks);

// --- geometric preparation ----------------------------------------------------

enum class Interpolation { Nearest, Trilinear };

Dims resampled_dims(const Dims& dims, const Spacing& from, const Spacing& to);

MaskVolume resample(const MaskVolume& v, const Spacing& target,
                    Interpolation mode = Interpolation::Nearest);
ProbVolume resample(const ProbVolume& v, const Spacing& target,
                    Interpolation mode = Interpolation::Trilinear);
LayeredLabelVolume resample(const LayeredLabelVolume& v, const Spacing& target,
                            Interpolation mode = Interpolation::Nearest);

/// Extracts a box of `size` voxels whose centre voxel is `center`
/// (offset size/2 from the box origin). Regions outside the input are zero.
MaskVolume crop_around(const MaskVolume& v, VoxelCoord center,
                       std::array<std::size_t, 3> size = kDefaultCropSize);
ProbVolume crop_around(const ProbVolume& v, VoxelCoord center,
                       std::array<std::size_t, 3> size = kDefaultCropSize);
LayeredLabelVolume crop_around(const LayeredLabelVolume& v, VoxelCoord center,
                               std::array<std::size_t, 3> size = kDefaultCropSize);

/// Voxel-space centroid of a channel, rounded to the nearest voxel.
std::optional<VoxelCoord> channel_center(const MaskVolume& v, ChannelId id);

}  // namespace vinv
