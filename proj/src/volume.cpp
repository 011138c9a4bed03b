#include "vinv/volume.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

namespace vinv {

namespace {

constexpr std::array<std::string_view, 8> kChannelNames{
    "pancreas", "common_bile_duct", "pancreatic_duct", "artery",
    "vein",     "tumor",            "tumor_artery",    "tumor_vein"};

constexpr std::string_view kFormatName = "vinv-volume";
constexpr int kFormatVersion = 1;
constexpr std::string_view kOrder = "channel-major,z,y,x";

}  // namespace

std::string_view channel_name(ChannelId id) {
    return kChannelNames.at(static_cast<std::size_t>(id));
}

std::optional<ChannelId> channel_from_name(std::string_view name) {
    for (std::size_t i = 0; i < kChannelNames.size(); ++i) {
        if (kChannelNames[i] == name) return static_cast<ChannelId>(i);
    }
    return std::nullopt;
}

bool Spacing::valid() const {
    auto ok = [](double v) { return std::isfinite(v) && v > 0.0; };
    return ok(z_mm) && ok(y_mm) && ok(x_mm);
}

// --- ChannelVolume -----------------------------------------------------------

template <typename T>
ChannelVolume<T>::ChannelVolume(Dims dims, std::vector<ChannelId> channels, Spacing spacing)
    : dims_(dims), channels_(std::move(channels)), spacing_(spacing) {
    data_.assign(channels_.size() * dims_.voxels(), T{0});
    validate();
}

template <typename T>
ChannelVolume<T>::ChannelVolume(Dims dims, std::vector<ChannelId> channels, Spacing spacing,
                                std::vector<T> data)
    : dims_(dims), channels_(std::move(channels)), spacing_(spacing), data_(std::move(data)) {
    validate();
}

template <typename T>
void ChannelVolume<T>::validate() const {
    if (!spacing_.valid()) throw VolumeError("spacing must be positive and finite");
    std::set<ChannelId> seen(channels_.begin(), channels_.end());
    if (seen.size() != channels_.size()) throw VolumeError("duplicate channel");
    if (data_.size() != channels_.size() * dims_.voxels())
        throw VolumeError("payload size mismatch");
    if constexpr (std::is_same_v<T, std::uint8_t>) {
        if (std::any_of(data_.begin(), data_.end(), [](std::uint8_t v) { return v > 1; }))
            throw VolumeError("mask values must be 0 or 1");
    } else {
        if (std::any_of(data_.begin(), data_.end(),
                        [](float v) { return !(v >= 0.0f && v <= 1.0f); }))
            throw VolumeError("probability values must lie in [0,1]");
    }
}

template <typename T>
std::optional<std::size_t> ChannelVolume<T>::channel_index(ChannelId id) const {
    auto it = std::find(channels_.begin(), channels_.end(), id);
    if (it == channels_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - channels_.begin());
}

template <typename T>
std::span<const T> ChannelVolume<T>::channel_at(std::size_t index) const {
    return std::span<const T>(data_).subspan(index * dims_.voxels(), dims_.voxels());
}

template <typename T>
std::span<T> ChannelVolume<T>::channel_at(std::size_t index) {
    return std::span<T>(data_).subspan(index * dims_.voxels(), dims_.voxels());
}

template <typename T>
std::span<const T> ChannelVolume<T>::channel(ChannelId id) const {
    auto idx = channel_index(id);
    if (!idx) throw MissingChannelError("missing channel: " + std::string(channel_name(id)));
    return channel_at(*idx);
}

template <typename T>
std::span<T> ChannelVolume<T>::channel(ChannelId id) {
    auto idx = channel_index(id);
    if (!idx) throw MissingChannelError("missing channel: " + std::string(channel_name(id)));
    return channel_at(*idx);
}

template class ChannelVolume<std::uint8_t>;
template class ChannelVolume<float>;

// --- file format -------------------------------------------------------------

namespace {

struct Header {
    Dims dims;
    std::vector<std::string> channel_names;
    Spacing spacing;
    std::string dtype;
    std::optional<CropPadding> padding;
};

Header parse_header(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw VolumeError("cannot open header: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw VolumeError("garbled header " + path.string() + ": " + e.what());
    }
    Header h;
    try {
        if (j.contains("format") && j.at("format").get<std::string>() != kFormatName)
            throw VolumeError("unknown format tag in " + path.string());
        auto dims = j.at("dims").get<std::vector<long long>>();
        if (dims.size() != 3) throw VolumeError("dims must have three entries");
        for (auto d : dims)
            if (d <= 0) throw VolumeError("dims must be positive");
        h.dims = {static_cast<std::size_t>(dims[0]), static_cast<std::size_t>(dims[1]),
                  static_cast<std::size_t>(dims[2])};
        h.channel_names = j.at("channels").get<std::vector<std::string>>();
        if (h.channel_names.empty()) throw VolumeError("channels must not be empty");
        if (j.contains("spacing_mm")) {
            auto sp = j.at("spacing_mm").get<std::vector<double>>();
            if (sp.size() != 3) throw VolumeError("spacing_mm must have three entries");
            h.spacing = {sp[0], sp[1], sp[2]};
        }
        h.dtype = j.at("dtype").get<std::string>();
        if (j.contains("order") && j.at("order").get<std::string>() != kOrder)
            throw VolumeError("unsupported voxel order: " + j.at("order").get<std::string>());
        if (j.contains("padding")) {
            CropPadding p;
            auto before = j.at("padding").at("before").get<std::vector<std::size_t>>();
            auto after = j.at("padding").at("after").get<std::vector<std::size_t>>();
            if (before.size() != 3 || after.size() != 3)
                throw VolumeError("padding entries must have three values");
            std::copy(before.begin(), before.end(), p.before.begin());
            std::copy(after.begin(), after.end(), p.after.begin());
            h.padding = p;
        }
    } catch (const nlohmann::json::exception& e) {
        throw VolumeError("garbled header " + path.string() + ": " + e.what());
    }
    if (!h.spacing.valid()) throw VolumeError("spacing must be positive and finite");
    if (h.dtype != "u8" && h.dtype != "f32") throw VolumeError("unknown dtype: " + h.dtype);
    return h;
}

std::vector<char> read_payload(const std::filesystem::path& raw, std::size_t expected) {
    std::ifstream in(raw, std::ios::binary);
    if (!in) throw VolumeError("cannot open payload: " + raw.string());
    std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.size() != expected)
        throw VolumeError("payload size mismatch: expected " + std::to_string(expected) +
                          " bytes, found " + std::to_string(bytes.size()));
    return bytes;
}

float load_f32_le(const char* p) {
    std::uint32_t bits = 0;
    for (int b = 3; b >= 0; --b) bits = (bits << 8) | static_cast<std::uint8_t>(p[b]);
    return std::bit_cast<float>(bits);
}

void store_f32_le(float v, char* p) {
    auto bits = std::bit_cast<std::uint32_t>(v);
    for (int b = 0; b < 4; ++b) p[b] = static_cast<char>((bits >> (8 * b)) & 0xFFu);
}

std::vector<ChannelId> resolve_channels(const std::vector<std::string>& names) {
    std::vector<ChannelId> ids;
    ids.reserve(names.size());
    for (const auto& n : names) {
        auto id = channel_from_name(n);
        if (!id) throw VolumeError("unknown channel name: " + n);
        ids.push_back(*id);
    }
    return ids;
}

nlohmann::json header_json(const Dims& d, const std::vector<std::string>& names,
                           const Spacing& s, std::string_view dtype,
                           const std::optional<CropPadding>& padding) {
    nlohmann::json j;
    j["format"] = kFormatName;
    j["version"] = kFormatVersion;
    j["dims"] = {d.z, d.y, d.x};
    j["channels"] = names;
    j["spacing_mm"] = {s.z_mm, s.y_mm, s.x_mm};
    j["dtype"] = dtype;
    j["order"] = kOrder;
    if (padding) {
        j["padding"] = {{"before", padding->before}, {"after", padding->after}};
    }
    return j;
}

void write_files(const std::filesystem::path& header, const nlohmann::json& j,
                 const std::vector<char>& payload) {
    std::ofstream h(header);
    if (!h) throw VolumeError("cannot write header: " + header.string());
    h << j.dump(2) << '\n';
    if (!h) throw VolumeError("failed writing header: " + header.string());
    auto raw = raw_path_for(header);
    std::ofstream r(raw, std::ios::binary);
    if (!r) throw VolumeError("cannot write payload: " + raw.string());
    r.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    if (!r) throw VolumeError("failed writing payload: " + raw.string());
}

std::vector<std::string> names_of(const std::vector<ChannelId>& ids) {
    std::vector<std::string> names;
    for (auto id : ids) names.emplace_back(channel_name(id));
    return names;
}

}  // namespace

std::filesystem::path raw_path_for(const std::filesystem::path& header) {
    auto raw = header;
    raw.replace_extension(".raw");
    return raw;
}

AnyVolume read_volume(const std::filesystem::path& header) {
    Header h = parse_header(header);
    const bool labels = h.channel_names.size() == 1 && h.channel_names[0] == kLabelChannelName;
    const std::size_t count = h.channel_names.size() * h.dims.voxels();
    const auto raw = raw_path_for(header);

    if (h.dtype == "u8") {
        auto bytes = read_payload(raw, count);
        std::vector<std::uint8_t> data(bytes.begin(), bytes.end());
        if (labels) {
            if (std::any_of(data.begin(), data.end(), [](std::uint8_t v) { return v > 8; }))
                throw VolumeError("layered label out of range 0..8");
            return LayeredLabelVolume{h.dims, h.spacing, std::move(data), h.padding};
        }
        if (std::any_of(data.begin(), data.end(), [](std::uint8_t v) { return v > 1; }))
            throw VolumeError("mask values must be 0 or 1");
        MaskVolume v(h.dims, resolve_channels(h.channel_names), h.spacing, std::move(data));
        if (h.padding) v.set_padding(*h.padding);
        return v;
    }

    if (labels) throw VolumeError("layered labels must be stored as u8");
    auto bytes = read_payload(raw, count * 4);
    std::vector<float> data(count);
    for (std::size_t i = 0; i < count; ++i) {
        float f = load_f32_le(bytes.data() + 4 * i);
        if (!(f >= -kProbabilityIngestTolerance && f <= 1.0f + kProbabilityIngestTolerance))
            throw VolumeError("probability value out of range at element " + std::to_string(i));
        data[i] = std::clamp(f, 0.0f, 1.0f);
    }
    ProbVolume v(h.dims, resolve_channels(h.channel_names), h.spacing, std::move(data));
    if (h.padding) v.set_padding(*h.padding);
    return v;
}

MaskVolume read_mask(const std::filesystem::path& header) {
    auto v = read_volume(header);
    if (auto* m = std::get_if<MaskVolume>(&v)) return std::move(*m);
    throw VolumeError("expected a u8 mask volume: " + header.string());
}

ProbVolume read_prob(const std::filesystem::path& header) {
    auto v = read_volume(header);
    if (auto* p = std::get_if<ProbVolume>(&v)) return std::move(*p);
    throw VolumeError("expected an f32 probability volume: " + header.string());
}

MaskVolume read_masks_any(const std::filesystem::path& header) {
    auto v = read_volume(header);
    if (auto* m = std::get_if<MaskVolume>(&v)) return std::move(*m);
    if (auto* l = std::get_if<LayeredLabelVolume>(&v)) return decode_layered(*l);
    throw VolumeError("expected a mask or layered-label volume: " + header.string());
}

void write_volume(const MaskVolume& v, const std::filesystem::path& header) {
    std::vector<char> payload(v.data().begin(), v.data().end());
    write_files(header, header_json(v.dims(), names_of(v.channels()), v.spacing(), "u8", v.padding()),
                payload);
}

void write_volume(const ProbVolume& v, const std::filesystem::path& header) {
    std::vector<char> payload(v.data().size() * 4);
    for (std::size_t i = 0; i < v.data().size(); ++i) store_f32_le(v.data()[i], payload.data() + 4 * i);
    write_files(header, header_json(v.dims(), names_of(v.channels()), v.spacing(), "f32", v.padding()),
                payload);
}

void write_volume(const LayeredLabelVolume& v, const std::filesystem::path& header) {
    if (v.labels.size() != v.dims.voxels()) throw VolumeError("payload size mismatch");
    std::vector<char> payload(v.labels.begin(), v.labels.end());
    write_files(header,
                header_json(v.dims, {std::string(kLabelChannelName)}, v.spacing, "u8", v.padding),
                payload);
}

void write_volume(const AnyVolume& v, const std::filesystem::path& header) {
    std::visit([&](const auto& vol) { write_volume(vol, header); }, v);
}

// --- label layering ----------------------------------------------------------

MaskVolume decode_layered(const LayeredLabelVolume& lv) {
    const std::size_t n = lv.dims.voxels();
    if (lv.labels.size() != n) throw VolumeError("payload size mismatch");
    std::vector<ChannelId> channels(kBaseChannels.begin(), kBaseChannels.end());
    MaskVolume out(lv.dims, channels, lv.spacing);
    auto artery = out.channel(ChannelId::Artery);
    auto vein = out.channel(ChannelId::Vein);
    auto tumor = out.channel(ChannelId::Tumor);
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint8_t label = lv.labels[i];
        if (label == 0) continue;
        if (label <= 6) {
            out.channel_at(label - 1u)[i] = 1;
        } else if (label == 7) {
            artery[i] = 1;
            tumor[i] = 1;
        } else if (label == 8) {
            vein[i] = 1;
            tumor[i] = 1;
        } else {
            throw VolumeError("layered label out of range 0..8: " + std::to_string(label));
        }
    }
    if (lv.padding) out.set_padding(*lv.padding);
    return out;
}

LayeredLabelVolume encode_layered(const MaskVolume& masks) {
    const std::size_t n = masks.dims().voxels();
    auto get = [&](ChannelId id) -> std::span<const std::uint8_t> {
        auto idx = masks.channel_index(id);
        return idx ? masks.channel_at(*idx) : std::span<const std::uint8_t>{};
    };
    auto on = [](std::span<const std::uint8_t> c, std::size_t i) { return !c.empty() && c[i]; };
    const auto pancreas = get(ChannelId::Pancreas), cbd = get(ChannelId::CommonBileDuct),
               pd = get(ChannelId::PancreaticDuct), artery = get(ChannelId::Artery),
               vein = get(ChannelId::Vein), tumor = get(ChannelId::Tumor);

    LayeredLabelVolume out{masks.dims(), masks.spacing(), std::vector<std::uint8_t>(n, 0),
                           masks.padding()};
    for (std::size_t i = 0; i < n; ++i) {
        std::uint8_t label = 0;
        if (on(tumor, i)) {
            label = on(vein, i) ? 8 : on(artery, i) ? 7 : 6;
        } else if (on(vein, i)) {
            label = 5;
        } else if (on(artery, i)) {
            label = 4;
        } else if (on(pd, i)) {
            label = 3;
        } else if (on(cbd, i)) {
            label = 2;
        } else if (on(pancreas, i)) {
            label = 1;
        }
        out.labels[i] = label;
    }
    return out;
}

// --- resample ------------------------------------------------------------------

namespace {

std::size_t scaled_extent(std::size_t n, double from, double to) {
    auto v = static_cast<long long>(std::llround(static_cast<double>(n) * from / to));
    return static_cast<std::size_t>(std::max(1LL, v));
}

// Voxel-centre aligned mapping from output index to input coordinate.
double source_coord(std::size_t o, double from, double to) {
    return (static_cast<double>(o) + 0.5) * to / from - 0.5;
}

std::size_t nearest_index(double src, std::size_t n) {
    auto i = static_cast<long long>(std::floor(src + 0.5));
    return static_cast<std::size_t>(std::clamp<long long>(i, 0, static_cast<long long>(n) - 1));
}

template <typename T>
std::vector<T> resample_grid(const std::vector<T>& in, std::size_t channels, const Dims& d,
                             const Spacing& from, const Dims& od, const Spacing& to,
                             Interpolation mode) {
    std::vector<T> out(channels * od.voxels());
    const std::array<double, 3> fs{from.z_mm, from.y_mm, from.x_mm};
    const std::array<double, 3> ts{to.z_mm, to.y_mm, to.x_mm};
    const std::array<std::size_t, 3> in_n{d.z, d.y, d.x};
    const std::array<std::size_t, 3> out_n{od.z, od.y, od.x};

    std::array<std::vector<double>, 3> src;
    for (int a = 0; a < 3; ++a) {
        src[a].resize(out_n[a]);
        for (std::size_t o = 0; o < out_n[a]; ++o) src[a][o] = source_coord(o, fs[a], ts[a]);
    }

    for (std::size_t c = 0; c < channels; ++c) {
        const T* cin = in.data() + c * d.voxels();
        T* cout = out.data() + c * od.voxels();
        for (std::size_t z = 0; z < od.z; ++z) {
            for (std::size_t y = 0; y < od.y; ++y) {
                for (std::size_t x = 0; x < od.x; ++x) {
                    T& dst = cout[od.index(z, y, x)];
                    if (mode == Interpolation::Nearest) {
                        dst = cin[d.index(nearest_index(src[0][z], d.z),
                                          nearest_index(src[1][y], d.y),
                                          nearest_index(src[2][x], d.x))];
                        continue;
                    }
                    if constexpr (std::is_floating_point_v<T>) {
                        std::array<std::size_t, 3> lo{}, hi{};
                        std::array<double, 3> frac{};
                        const std::array<double, 3> p{src[0][z], src[1][y], src[2][x]};
                        for (int a = 0; a < 3; ++a) {
                            double s = std::clamp(p[a], 0.0, static_cast<double>(in_n[a] - 1));
                            lo[a] = static_cast<std::size_t>(std::floor(s));
                            hi[a] = std::min(lo[a] + 1, in_n[a] - 1);
                            frac[a] = s - static_cast<double>(lo[a]);
                        }
                        double acc = 0.0;
                        for (int corner = 0; corner < 8; ++corner) {
                            const bool bz = corner & 4, by = corner & 2, bx = corner & 1;
                            const double w = (bz ? frac[0] : 1.0 - frac[0]) *
                                             (by ? frac[1] : 1.0 - frac[1]) *
                                             (bx ? frac[2] : 1.0 - frac[2]);
                            if (w == 0.0) continue;
                            acc += w * cin[d.index(bz ? hi[0] : lo[0], by ? hi[1] : lo[1],
                                                   bx ? hi[2] : lo[2])];
                        }
                        dst = static_cast<T>(std::clamp(acc, 0.0, 1.0));
                    }
                }
            }
        }
    }
    return out;
}

void check_target(const Spacing& target) {
    if (!target.valid()) throw VolumeError("target spacing must be positive and finite");
}

}  // namespace

Dims resampled_dims(const Dims& dims, const Spacing& from, const Spacing& to) {
    check_target(to);
    return {scaled_extent(dims.z, from.z_mm, to.z_mm), scaled_extent(dims.y, from.y_mm, to.y_mm),
            scaled_extent(dims.x, from.x_mm, to.x_mm)};
}

MaskVolume resample(const MaskVolume& v, const Spacing& target, Interpolation mode) {
    check_target(target);
    if (mode != Interpolation::Nearest)
        throw VolumeError("masks must be resampled with nearest-neighbour interpolation");
    Dims od = resampled_dims(v.dims(), v.spacing(), target);
    return MaskVolume(od, v.channels(), target,
                      resample_grid(v.data(), v.channel_count(), v.dims(), v.spacing(), od,
                                    target, mode));
}

ProbVolume resample(const ProbVolume& v, const Spacing& target, Interpolation mode) {
    check_target(target);
    Dims od = resampled_dims(v.dims(), v.spacing(), target);
    return ProbVolume(od, v.channels(), target,
                      resample_grid(v.data(), v.channel_count(), v.dims(), v.spacing(), od,
                                    target, mode));
}

LayeredLabelVolume resample(const LayeredLabelVolume& v, const Spacing& target,
                            Interpolation mode) {
    check_target(target);
    if (mode != Interpolation::Nearest)
        throw VolumeError("labels must be resampled with nearest-neighbour interpolation");
    Dims od = resampled_dims(v.dims, v.spacing, target);
    return {od, target, resample_grid(v.labels, 1, v.dims, v.spacing, od, target, mode),
            std::nullopt};
}

// --- crop --------------------------------------------------------------------

namespace {

template <typename T>
std::vector<T> crop_grid(const std::vector<T>& in, std::size_t channels, const Dims& d,
                         VoxelCoord center, std::array<std::size_t, 3> size, CropPadding& pad) {
    const std::array<std::ptrdiff_t, 3> c{center.z, center.y, center.x};
    const std::array<std::size_t, 3> n{d.z, d.y, d.x};
    for (int a = 0; a < 3; ++a) {
        if (c[a] < 0 || c[a] >= static_cast<std::ptrdiff_t>(n[a]))
            throw VolumeError("crop centre outside volume bounds");
        if (size[a] == 0) throw VolumeError("crop size must be positive");
    }
    std::array<std::ptrdiff_t, 3> origin{};
    for (int a = 0; a < 3; ++a) {
        origin[a] = c[a] - static_cast<std::ptrdiff_t>(size[a] / 2);
        const auto end = origin[a] + static_cast<std::ptrdiff_t>(size[a]);
        pad.before[a] = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, -origin[a]));
        pad.after[a] = static_cast<std::size_t>(
            std::max<std::ptrdiff_t>(0, end - static_cast<std::ptrdiff_t>(n[a])));
    }
    const Dims od{size[0], size[1], size[2]};
    std::vector<T> out(channels * od.voxels(), T{0});
    for (std::size_t ch = 0; ch < channels; ++ch) {
        for (std::size_t z = 0; z < od.z; ++z) {
            const auto sz = origin[0] + static_cast<std::ptrdiff_t>(z);
            if (sz < 0 || sz >= static_cast<std::ptrdiff_t>(d.z)) continue;
            for (std::size_t y = 0; y < od.y; ++y) {
                const auto sy = origin[1] + static_cast<std::ptrdiff_t>(y);
                if (sy < 0 || sy >= static_cast<std::ptrdiff_t>(d.y)) continue;
                for (std::size_t x = 0; x < od.x; ++x) {
                    const auto sx = origin[2] + static_cast<std::ptrdiff_t>(x);
                    if (sx < 0 || sx >= static_cast<std::ptrdiff_t>(d.x)) continue;
                    out[ch * od.voxels() + od.index(z, y, x)] =
                        in[ch * d.voxels() + d.index(static_cast<std::size_t>(sz),
                                                     static_cast<std::size_t>(sy),
                                                     static_cast<std::size_t>(sx))];
                }
            }
        }
    }
    return out;
}

}  // namespace

MaskVolume crop_around(const MaskVolume& v, VoxelCoord center, std::array<std::size_t, 3> size) {
    CropPadding pad;
    auto data = crop_grid(v.data(), v.channel_count(), v.dims(), center, size, pad);
    MaskVolume out({size[0], size[1], size[2]}, v.channels(), v.spacing(), std::move(data));
    out.set_padding(pad);
    return out;
}

ProbVolume crop_around(const ProbVolume& v, VoxelCoord center, std::array<std::size_t, 3> size) {
    CropPadding pad;
    auto data = crop_grid(v.data(), v.channel_count(), v.dims(), center, size, pad);
    ProbVolume out({size[0], size[1], size[2]}, v.channels(), v.spacing(), std::move(data));
    out.set_padding(pad);
    return out;
}

LayeredLabelVolume crop_around(const LayeredLabelVolume& v, VoxelCoord center,
                               std::array<std::size_t, 3> size) {
    CropPadding pad;
    auto data = crop_grid(v.labels, 1, v.dims, center, size, pad);
    return {{size[0], size[1], size[2]}, v.spacing, std::move(data), pad};
}

std::optional<VoxelCoord> channel_center(const MaskVolume& v, ChannelId id) {
    auto ch = v.channel(id);
    const Dims& d = v.dims();
    double sz = 0, sy = 0, sx = 0;
    std::size_t count = 0;
    for (std::size_t z = 0; z < d.z; ++z)
        for (std::size_t y = 0; y < d.y; ++y)
            for (std::size_t x = 0; x < d.x; ++x)
                if (ch[d.index(z, y, x)]) {
                    sz += static_cast<double>(z);
                    sy += static_cast<double>(y);
                    sx += static_cast<double>(x);
                    ++count;
                }
    if (count == 0) return std::nullopt;
    const double n = static_cast<double>(count);
    return VoxelCoord{std::llround(sz / n), std::llround(sy / n), std::llround(sx / n)};
}

}  // namespace vinv
