#include "vinv/involvement.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace vinv {

namespace {

constexpr std::array<std::array<int, 2>, 4> kOffsets4{{{-1, 0}, {0, -1}, {0, 1}, {1, 0}}};
constexpr std::array<std::array<int, 2>, 8> kOffsets8{
    {{-1, -1}, {-1, 0}, {-1, 1}, {0, -1}, {0, 1}, {1, -1}, {1, 0}, {1, 1}}};

std::span<const std::array<int, 2>> offsets_for(Connectivity c) {
    if (c == Connectivity::Four) return kOffsets4;
    return kOffsets8;
}

void require_same_shape(const SliceView& a, const SliceView& b) {
    if (a.rows != b.rows || a.cols != b.cols)
        throw InvolvementError("slice dimension mismatch");
}

}  // namespace

std::string_view to_string(SpanMethod m) {
    return m == SpanMethod::LargestGap ? "largest-gap" : "minmax";
}

std::string_view to_string(Connectivity c) { return c == Connectivity::Four ? "4" : "8"; }

std::string_view to_string(VesselKind k) { return k == VesselKind::Artery ? "artery" : "vein"; }

ChannelId channel_for(VesselKind k) {
    return k == VesselKind::Artery ? ChannelId::Artery : ChannelId::Vein;
}

std::string_view to_string(DpcgCategory c) {
    switch (c) {
        case DpcgCategory::Resectable: return "resectable";
        case DpcgCategory::BorderlineResectable: return "borderline_resectable";
        case DpcgCategory::Irresectable: return "irresectable";
    }
    return "unknown";
}

std::string_view to_string(FilterMode m) { return m == FilterMode::Voxel ? "voxel" : "component"; }

SliceView slice_of(std::span<const std::uint8_t> channel, const Dims& dims, std::size_t z) {
    if (z >= dims.z) throw InvolvementError("slice index out of range");
    return {dims.y, dims.x, channel.subspan(z * dims.slice_size(), dims.slice_size())};
}

std::vector<Component2D> connected_components(const SliceView& mask, Connectivity connectivity,
                                              std::size_t z) {
    const auto rows = static_cast<int>(mask.rows);
    const auto cols = static_cast<int>(mask.cols);
    std::vector<std::uint8_t> visited(mask.rows * mask.cols, 0);
    std::vector<Component2D> out;
    std::vector<Pixel> stack;
    const auto offsets = offsets_for(connectivity);

    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const auto idx = static_cast<std::size_t>(r * cols + c);
            if (!mask.pixels[idx] || visited[idx]) continue;
            Component2D comp{z, {}, connectivity};
            visited[idx] = 1;
            stack.push_back({r, c});
            while (!stack.empty()) {
                Pixel p = stack.back();
                stack.pop_back();
                comp.pixels.push_back(p);
                for (const auto& [dr, dc] : offsets) {
                    const int nr = p.row + dr, nc = p.col + dc;
                    if (!mask.at(nr, nc)) continue;
                    const auto nidx = static_cast<std::size_t>(nr * cols + nc);
                    if (visited[nidx]) continue;
                    visited[nidx] = 1;
                    stack.push_back({nr, nc});
                }
            }
            std::sort(comp.pixels.begin(), comp.pixels.end());
            out.push_back(std::move(comp));
        }
    }
    return out;
}

double pixel_angle(PointF centroid, Pixel pixel) {
    const double dr = static_cast<double>(pixel.row) - centroid.row;
    const double dc = static_cast<double>(pixel.col) - centroid.col;
    if (dr == 0.0 && dc == 0.0) throw InvolvementError("pixel_angle: zero radius");
    double deg = std::atan2(-dr, dc) * 180.0 / std::numbers::pi;
    if (deg < 0.0) deg += 360.0;
    if (deg >= 360.0) deg -= 360.0;
    return deg;
}

ContactSet contact_pixels(const SliceView& tumor, const Component2D& vessel,
                          Connectivity neighbourhood) {
    if (vessel.pixels.empty()) throw InvolvementError("vessel component is empty");
    ContactSet cs;
    cs.z = vessel.z;
    double sr = 0.0, sc = 0.0;
    for (const Pixel& p : vessel.pixels) {
        if (p.row < 0 || p.col < 0 || static_cast<std::size_t>(p.row) >= tumor.rows ||
            static_cast<std::size_t>(p.col) >= tumor.cols)
            throw InvolvementError("vessel component exceeds slice dimensions");
        sr += p.row;
        sc += p.col;
    }
    const auto n = static_cast<double>(vessel.pixels.size());
    cs.centroid = {sr / n, sc / n};

    const auto offsets = offsets_for(neighbourhood);
    for (const Pixel& p : vessel.pixels) {
        bool touching = tumor.at(p.row, p.col);
        for (std::size_t k = 0; !touching && k < offsets.size(); ++k)
            touching = tumor.at(p.row + offsets[k][0], p.col + offsets[k][1]);
        if (!touching) continue;
        cs.contacts.push_back(p);
        const double dr = p.row - cs.centroid.row, dc = p.col - cs.centroid.col;
        if (dr != 0.0 || dc != 0.0) cs.angles.push_back(pixel_angle(cs.centroid, p));
    }
    return cs;
}

double angular_span(std::span<const double> angles, SpanMethod method) {
    if (angles.size() < 2) return 0.0;
    std::vector<double> sorted(angles.begin(), angles.end());
    std::sort(sorted.begin(), sorted.end());
    if (method == SpanMethod::MinMax) return sorted.back() - sorted.front();

    double max_gap = 360.0 - sorted.back() + sorted.front();
    for (std::size_t i = 1; i < sorted.size(); ++i)
        max_gap = std::max(max_gap, sorted[i] - sorted[i - 1]);
    return 360.0 - max_gap;
}

SliceInvolvement slice_involvement(const SliceView& tumor, const SliceView& vessel,
                                   const InvolvementOptions& opts, std::size_t z) {
    require_same_shape(tumor, vessel);
    SliceInvolvement si;
    si.z = z;
    auto components = connected_components(vessel, opts.connectivity, z);
    for (std::size_t i = 0; i < components.size(); ++i) {
        ContactSet cs = contact_pixels(tumor, components[i], opts.connectivity);
        cs.component = i;
        const double span = angular_span(cs.angles, opts.span_method);
        si.spans.push_back(span);
        if (!cs.contacts.empty()) {
            si.presence = true;
            si.max_span = std::max(si.max_span, span);
            si.contacts.push_back(std::move(cs));
        }
    }
    return si;
}

InvolvementReport scan_involvement(const MaskVolume& masks, VesselKind vessel,
                                   const InvolvementOptions& opts) {
    const auto tumor = masks.channel(ChannelId::Tumor);
    const auto vessel_ch = masks.channel(channel_for(vessel));
    const Dims& d = masks.dims();

    InvolvementReport report;
    report.vessel = vessel;
    report.slices.reserve(d.z);
    for (std::size_t z = 0; z < d.z; ++z) {
        auto si = slice_involvement(slice_of(tumor, d, z), slice_of(vessel_ch, d, z), opts, z);
        if (si.presence) {
            if (!report.presence || si.max_span > report.max_span) {
                report.max_span = si.max_span;
                report.argmax_slice = z;
            }
            report.presence = true;
        }
        report.slices.push_back(std::move(si));
    }
    return report;
}

std::vector<std::uint8_t> filter_critical(std::span<const std::uint8_t> vessel,
                                          std::span<const std::uint8_t> pancreas,
                                          const Dims& dims, FilterMode mode) {
    const std::size_t n = dims.voxels();
    if (vessel.size() != n || pancreas.size() != n)
        throw InvolvementError("filter_critical: geometry mismatch");
    std::vector<std::uint8_t> out(vessel.begin(), vessel.end());

    if (mode == FilterMode::Voxel) {
        for (std::size_t i = 0; i < n; ++i)
            if (pancreas[i]) out[i] = 0;
        return out;
    }

    // 26-connected vessel components; drop those with any voxel in the pancreas.
    std::vector<std::int32_t> label(n, -1);
    std::vector<std::size_t> stack, members;
    std::int32_t next = 0;
    for (std::size_t seed = 0; seed < n; ++seed) {
        if (!vessel[seed] || label[seed] >= 0) continue;
        members.clear();
        bool touches = false;
        label[seed] = next;
        stack.push_back(seed);
        while (!stack.empty()) {
            const std::size_t i = stack.back();
            stack.pop_back();
            members.push_back(i);
            touches = touches || pancreas[i];
            const auto z = static_cast<std::ptrdiff_t>(i / dims.slice_size());
            const auto y = static_cast<std::ptrdiff_t>((i / dims.x) % dims.y);
            const auto x = static_cast<std::ptrdiff_t>(i % dims.x);
            for (std::ptrdiff_t dz = -1; dz <= 1; ++dz)
                for (std::ptrdiff_t dy = -1; dy <= 1; ++dy)
                    for (std::ptrdiff_t dx = -1; dx <= 1; ++dx) {
                        const auto nz = z + dz, ny = y + dy, nx = x + dx;
                        if (nz < 0 || ny < 0 || nx < 0 ||
                            nz >= static_cast<std::ptrdiff_t>(dims.z) ||
                            ny >= static_cast<std::ptrdiff_t>(dims.y) ||
                            nx >= static_cast<std::ptrdiff_t>(dims.x))
                            continue;
                        const auto j = dims.index(static_cast<std::size_t>(nz),
                                                  static_cast<std::size_t>(ny),
                                                  static_cast<std::size_t>(nx));
                        if (!vessel[j] || label[j] >= 0) continue;
                        label[j] = next;
                        stack.push_back(j);
                    }
        }
        if (touches)
            for (auto i : members) out[i] = 0;
        ++next;
    }
    return out;
}

MaskVolume filter_critical(const MaskVolume& masks, FilterMode mode) {
    MaskVolume out = masks;
    const auto pancreas = masks.channel(ChannelId::Pancreas);
    for (ChannelId id : {ChannelId::Artery, ChannelId::Vein}) {
        auto idx = masks.channel_index(id);
        if (!idx) continue;
        auto filtered = filter_critical(masks.channel_at(*idx), pancreas, masks.dims(), mode);
        std::copy(filtered.begin(), filtered.end(), out.channel_at(*idx).begin());
    }
    return out;
}

namespace {

void check_degrees(double deg) {
    if (!(deg >= 0.0 && deg <= 360.0))
        throw InvolvementError("involvement degrees must lie in [0,360]");
}

}  // namespace

DpcgCategory venous_category(double degrees) {
    check_degrees(degrees);
    if (degrees <= 90.0) return DpcgCategory::Resectable;
    if (degrees <= 270.0) return DpcgCategory::BorderlineResectable;
    return DpcgCategory::Irresectable;
}

DpcgCategory arterial_category(double degrees) {
    check_degrees(degrees);
    if (degrees == 0.0) return DpcgCategory::Resectable;
    if (degrees <= 90.0) return DpcgCategory::BorderlineResectable;
    return DpcgCategory::Irresectable;
}

DpcgCategory dpcg_classify(double vein_degrees, double artery_degrees) {
    return std::max(venous_category(vein_degrees), arterial_category(artery_degrees));
}

}  // namespace vinv
