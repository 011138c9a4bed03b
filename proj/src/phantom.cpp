#include "vinv/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace vinv {

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;
// How far from an analytic arc end a rasterized end may be placed.
constexpr double kEndWindowDeg = 12.0;

double wrap360(double deg) {
    double d = std::fmod(deg, 360.0);
    if (d < 0.0) d += 360.0;
    return d;
}

std::vector<ChannelId> base_channels() { return {kBaseChannels.begin(), kBaseChannels.end()}; }

void paint_blob(MaskVolume& v, ChannelId id, const Blob& b) {
    auto ch = v.channel(id);
    const Dims& d = v.dims();
    for (std::size_t z = 0; z < d.z; ++z)
        for (std::size_t r = 0; r < d.y; ++r)
            for (std::size_t c = 0; c < d.x; ++c) {
                const double dz = (static_cast<double>(z) - b.z) / b.rz;
                const double dr = (static_cast<double>(r) - b.row) / b.rrow;
                const double dc = (static_cast<double>(c) - b.col) / b.rcol;
                if (dz * dz + dr * dr + dc * dc <= 1.0) ch[d.index(z, r, c)] = 1;
            }
}

}  // namespace

void validate(const PhantomSpec& s) {
    if (s.radius < 2) throw PhantomError("vessel radius must be at least 2 px");
    if (!(s.span_deg >= 0.0 && s.span_deg <= 360.0)) throw PhantomError("span must lie in [0,360]");
    if (s.thickness < 1) throw PhantomError("tumor thickness must be at least 1 px");
    if (!(s.band_deg >= 0.0) || s.span_deg + 2.0 * s.band_deg > 360.0)
        throw PhantomError("band must be non-negative and keep the arc within 360 degrees");
    if (s.dims.z == 0 || s.z_begin > s.z_end || s.z_end > s.dims.z)
        throw PhantomError("tumor slice range outside grid");
    const int reach = s.radius + s.thickness + 1;
    if (s.center_row - reach < 0 || s.center_col - reach < 0 ||
        s.center_row + reach >= static_cast<int>(s.dims.y) ||
        s.center_col + reach >= static_cast<int>(s.dims.x))
        throw PhantomError("vessel tube and wrap must lie inside the grid");
    if (!s.spacing.valid()) throw PhantomError("spacing must be positive");
}

void rasterize_disk(std::span<std::uint8_t> slice, std::size_t rows, std::size_t cols,
                    int center_row, int center_col, int radius) {
    // Midpoint circle: half-width of the disk for every row offset.
    std::vector<int> half(static_cast<std::size_t>(radius) + 1, -1);
    int x = radius, y = 0, err = 1 - radius;
    while (x >= y) {
        half[static_cast<std::size_t>(y)] = std::max(half[static_cast<std::size_t>(y)], x);
        half[static_cast<std::size_t>(x)] = std::max(half[static_cast<std::size_t>(x)], y);
        ++y;
        if (err < 0) {
            err += 2 * y + 1;
        } else {
            --x;
            err += 2 * (y - x) + 1;
        }
    }
    for (int dy = -radius; dy <= radius; ++dy) {
        const int w = half[static_cast<std::size_t>(std::abs(dy))];
        const int r = center_row + dy;
        if (w < 0 || r < 0 || r >= static_cast<int>(rows)) continue;
        for (int c = std::max(0, center_col - w); c <= std::min(static_cast<int>(cols) - 1, center_col + w); ++c)
            slice[static_cast<std::size_t>(r) * cols + static_cast<std::size_t>(c)] = 1;
    }
}

void rasterize_wrap(std::span<std::uint8_t> slice, std::size_t rows, std::size_t cols,
                    int center_row, int center_col, int radius, int thickness,
                    double start_deg, double extent_deg) {
    if (extent_deg <= 0.0) return;
    std::vector<std::uint8_t> disk(rows * cols, 0);
    rasterize_disk(disk, rows, cols, center_row, center_col, radius);
    auto vessel_at = [&](int r, int c) {
        return r >= 0 && c >= 0 && r < static_cast<int>(rows) && c < static_cast<int>(cols) &&
               disk[static_cast<std::size_t>(r) * cols + static_cast<std::size_t>(c)] != 0;
    };

    const PointF centre{static_cast<double>(center_row), static_cast<double>(center_col)};
    const bool full = extent_deg >= 360.0;
    auto on_arc = [&](int r, int c) {
        return full || wrap360(pixel_angle(centre, {r, c}) - start_deg) <= extent_deg;
    };

    // A contact run can only end at a rim pixel with a background neighbour
    // whose vessel neighbours all lie on the arc side of it. The two ends are
    // chosen among such pixels, and the rim pixels between them are the only
    // ones the tumor may touch.
    std::vector<std::uint8_t> allowed(rows * cols, 0);
    if (!full) {
        auto signed_offset = [](double a) {
            const double w = wrap360(a);
            return w > 180.0 ? w - 360.0 : w;
        };
        auto angle_at = [&](int r, int c) { return pixel_angle(centre, {r, c}); };
        // side = +1: every touched vessel pixel is counter-clockwise of (r, c).
        auto can_end = [&](int r, int c, int side) {
            const double a = angle_at(r, c);
            for (int dr = -1; dr <= 1; ++dr)
                for (int dc = -1; dc <= 1; ++dc) {
                    const int br = r + dr, bc = c + dc;
                    if (vessel_at(br, bc)) continue;
                    bool ok = true;
                    for (int er = -1; er <= 1 && ok; ++er)
                        for (int ec = -1; ec <= 1 && ok; ++ec) {
                            const int vr = br + er, vc = bc + ec;
                            if (!vessel_at(vr, vc) || (vr == r && vc == c)) continue;
                            if (vr == center_row && vc == center_col) continue;
                            ok = side * signed_offset(angle_at(vr, vc) - a) > 1e-9;
                        }
                    if (ok) return true;
                }
            return false;
        };
        struct Candidate {
            double offset, angle;
        };
        std::vector<Candidate> lo_ends, hi_ends;
        const int reach = radius + 1;
        std::vector<std::pair<std::size_t, double>> rim;
        for (int r = center_row - reach; r <= center_row + reach; ++r)
            for (int c = center_col - reach; c <= center_col + reach; ++c) {
                if (!vessel_at(r, c) || (r == center_row && c == center_col)) continue;
                bool edge = false;
                for (int dr = -1; dr <= 1 && !edge; ++dr)
                    for (int dc = -1; dc <= 1 && !edge; ++dc) edge = !vessel_at(r + dr, c + dc);
                if (!edge) continue;
                const double angle = angle_at(r, c);
                rim.emplace_back(static_cast<std::size_t>(r) * cols + static_cast<std::size_t>(c), angle);
                if (can_end(r, c, +1)) lo_ends.push_back({signed_offset(angle - start_deg), angle});
                if (can_end(r, c, -1)) hi_ends.push_back({signed_offset(angle - start_deg - extent_deg), angle});
            }
        // Ends are picked jointly among candidates near each analytic end:
        // the run closest to the analytic extent wins, then the smaller shift
        // of its centre.
        auto near_ends = [](std::vector<Candidate> v, double window) {
            double best = 1e9;
            for (const auto& c : v) best = std::min(best, std::abs(c.offset));
            window = std::max(window, best);
            std::erase_if(v, [&](const Candidate& c) { return std::abs(c.offset) > window + 1e-9; });
            return v;
        };
        struct Choice {
            double err, shift, lo_angle, run;
        };
        auto ranked = [&](double window) {
            std::vector<Choice> choices;
            for (const auto& lo : near_ends(lo_ends, window))
                for (const auto& hi : near_ends(hi_ends, window)) {
                    double len = wrap360(hi.angle - lo.angle);
                    if (len > extent_deg + 180.0) len = 0.0;  // ends crossed on a very short arc
                    choices.push_back({std::abs(len - extent_deg), std::abs(lo.offset + hi.offset), lo.angle, len});
                }
            std::sort(choices.begin(), choices.end(), [](const Choice& x, const Choice& y) {
                if (std::abs(x.err - y.err) > 1e-9) return x.err < y.err;
                if (std::abs(x.shift - y.shift) > 1e-9) return x.shift < y.shift;
                return x.lo_angle < y.lo_angle;
            });
            return choices;
        };
        // A run is usable when some background pixel touches only its pixels;
        // very short arcs may need a slightly worse pair.
        auto touchable = [&] {
            for (int r = center_row - reach - 1; r <= center_row + reach + 1; ++r)
                for (int c = center_col - reach - 1; c <= center_col + reach + 1; ++c) {
                    if (vessel_at(r, c) || r < 0 || c < 0 || r >= static_cast<int>(rows) || c >= static_cast<int>(cols))
                        continue;
                    bool touches = false, ok = true;
                    for (int dr = -1; dr <= 1; ++dr)
                        for (int dc = -1; dc <= 1; ++dc) {
                            if (!vessel_at(r + dr, c + dc)) continue;
                            touches = true;
                            ok = ok && allowed[static_cast<std::size_t>(r + dr) * cols + static_cast<std::size_t>(c + dc)];
                        }
                    if (touches && ok) return true;
                }
            return false;
        };
        auto apply = [&](const Choice& choice) {
            std::fill(allowed.begin(), allowed.end(), 0);
            for (const auto& [idx, angle] : rim)
                if (wrap360(angle - choice.lo_angle) <= choice.run + 1e-9) allowed[idx] = 1;
            return touchable();
        };
        bool done = false;
        for (double window : {kEndWindowDeg, 360.0}) {
            for (const auto& choice : ranked(window))
                if ((done = apply(choice))) break;
            if (done) break;
        }
    }

    const double outer = radius + thickness + 0.5;
    for (int r = center_row - radius - thickness - 1; r <= center_row + radius + thickness + 1; ++r) {
        for (int c = center_col - radius - thickness - 1; c <= center_col + radius + thickness + 1; ++c) {
            if (r < 0 || c < 0 || r >= static_cast<int>(rows) || c >= static_cast<int>(cols)) continue;
            if (vessel_at(r, c) || std::hypot(r - center_row, c - center_col) > outer) continue;
            // Pixels touching the vessel may only touch rim pixels on the arc.
            bool touches = false, all_on_arc = true;
            for (int dr = -1; dr <= 1; ++dr)
                for (int dc = -1; dc <= 1; ++dc) {
                    if (!vessel_at(r + dr, c + dc)) continue;
                    touches = true;
                    all_on_arc = all_on_arc && (full ||
                                 allowed[static_cast<std::size_t>(r + dr) * cols + static_cast<std::size_t>(c + dc)]);
                }
            const bool keep = touches ? all_on_arc : on_arc(r, c);
            if (keep) slice[static_cast<std::size_t>(r) * cols + static_cast<std::size_t>(c)] = 1;
        }
    }
}

std::pair<MaskVolume, PhantomTruth> gen_wrap_scene(const PhantomSpec& spec) {
    validate(spec);
    const Dims& d = spec.dims;
    MaskVolume v(d, base_channels(), spec.spacing);
    auto vessel = v.channel(channel_for(spec.vessel));
    auto tumor = v.channel(ChannelId::Tumor);
    const double start = spec.wrap_center_deg - spec.span_deg / 2.0;

    PhantomTruth truth;
    truth.slice_span.assign(d.z, 0.0);
    for (std::size_t z = 0; z < d.z; ++z) {
        auto vs = vessel.subspan(z * d.slice_size(), d.slice_size());
        rasterize_disk(vs, d.y, d.x, spec.center_row, spec.center_col, spec.radius);
        if (z < spec.z_begin || z >= spec.z_end || spec.span_deg <= 0.0) continue;
        auto ts = tumor.subspan(z * d.slice_size(), d.slice_size());
        rasterize_wrap(ts, d.y, d.x, spec.center_row, spec.center_col, spec.radius,
                       spec.thickness, start, spec.span_deg);
        truth.slice_span[z] = spec.span_deg;
    }
    if (spec.pancreas) paint_blob(v, ChannelId::Pancreas, *spec.pancreas);

    truth.presence = spec.span_deg > 0.0 && spec.z_end > spec.z_begin;
    truth.max_span = truth.presence ? spec.span_deg : 0.0;
    truth.category = spec.vessel == VesselKind::Vein ? dpcg_classify(truth.max_span, 0.0)
                                                     : dpcg_classify(0.0, truth.max_span);
    return {std::move(v), std::move(truth)};
}

std::vector<ConfusionScene> gen_confusion_suite(std::uint64_t seed, std::size_t count) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> span_dist(40.0, 300.0);
    std::uniform_real_distribution<double> angle_dist(0.0, 360.0);
    std::uniform_int_distribution<int> radius_dist(3, 5);

    constexpr Dims dims{4, 48, 48};
    constexpr int artery_row = 16, artery_col = 13, vein_row = 16, vein_col = 35;

    // (pred contact, gt contact) for each cell in TP, FP, TN, FN order.
    constexpr std::array<std::pair<bool, bool>, 4> combos{
        {{true, true}, {true, false}, {false, false}, {false, true}}};

    auto build = [&](bool artery_contact, bool vein_contact, int ra, int rv, double sa, double sv,
                     double ca, double cv) {
        MaskVolume v(dims, base_channels(), Spacing{});
        auto artery = v.channel(ChannelId::Artery);
        auto vein = v.channel(ChannelId::Vein);
        auto tumor = v.channel(ChannelId::Tumor);
        for (std::size_t z = 0; z < dims.z; ++z) {
            const auto off = z * dims.slice_size();
            rasterize_disk(artery.subspan(off, dims.slice_size()), dims.y, dims.x, artery_row, artery_col, ra);
            rasterize_disk(vein.subspan(off, dims.slice_size()), dims.y, dims.x, vein_row, vein_col, rv);
            if (z == 0 || z == dims.z - 1) continue;
            auto ts = tumor.subspan(off, dims.slice_size());
            if (artery_contact)
                rasterize_wrap(ts, dims.y, dims.x, artery_row, artery_col, ra, 2, ca - sa / 2, sa);
            if (vein_contact)
                rasterize_wrap(ts, dims.y, dims.x, vein_row, vein_col, rv, 2, cv - sv / 2, sv);
            // A detached lesion keeps the tumor channel non-empty in every scene.
            for (int r = 38; r < 42; ++r)
                for (int c = 22; c < 26; ++c) ts[static_cast<std::size_t>(r) * dims.x + c] = 1;
        }
        return v;
    };

    std::vector<ConfusionScene> out;
    for (std::size_t i = 0; i < count; ++i) {
        const auto& [pa, ga] = combos[i % 4];
        const auto& [pv, gv] = combos[(i / 4 + i) % 4];
        const int ra = radius_dist(rng), rv = radius_dist(rng);
        const double sa_p = span_dist(rng), sv_p = span_dist(rng), sa_g = span_dist(rng),
                     sv_g = span_dist(rng);
        const double ca_p = angle_dist(rng), cv_p = angle_dist(rng), ca_g = angle_dist(rng),
                     cv_g = angle_dist(rng);
        ConfusionScene s;
        s.id = "scene_" + std::string(i < 10 ? "0" : "") + std::to_string(i);
        s.pred = build(pa, pv, ra, rv, sa_p, sv_p, ca_p, cv_p);
        s.gt = build(ga, gv, ra, rv, sa_g, sv_g, ca_g, cv_g);
        s.artery = involvement_confusion(pa, ga);
        s.vein = involvement_confusion(pv, gv);
        s.scan = scan_confusion(pa, pv, ga, gv);
        out.push_back(std::move(s));
    }
    return out;
}

UncertaintyScene gen_uncertainty_scene(const PhantomSpec& spec, std::vector<double> ks,
                                       double threshold) {
    validate(spec);
    const Dims& d = spec.dims;
    const std::size_t n = d.voxels();

    // Core arc, and the core arc widened by the band on both sides.
    PhantomSpec core = spec;
    core.pancreas.reset();
    auto [core_masks, core_truth] = gen_wrap_scene(core);
    PhantomSpec wide = core;
    wide.span_deg = spec.span_deg + 2.0 * spec.band_deg;
    auto [wide_masks, wide_truth] = gen_wrap_scene(wide);

    constexpr float kInside = 0.9f, kOutside = 0.02f;
    const auto vessel_id = channel_for(spec.vessel);
    const auto core_tumor = core_masks.channel(ChannelId::Tumor);
    const auto wide_tumor = wide_masks.channel(ChannelId::Tumor);
    const auto vessel = core_masks.channel(vessel_id);

    UncertaintyScene scene;
    scene.ks = std::move(ks);
    for (std::size_t f = 0; f < kBandFoldValues.size(); ++f) {
        ProbVolume p(d, base_channels(), spec.spacing);
        std::fill(p.data().begin(), p.data().end(), kOutside);
        auto pt = p.channel(ChannelId::Tumor);
        auto pv = p.channel(vessel_id);
        for (std::size_t i = 0; i < n; ++i) {
            if (vessel[i]) pv[i] = kInside;
            if (core_tumor[i])
                pt[i] = kInside;
            else if (wide_tumor[i])
                pt[i] = spec.band_deg > 0.0 ? kBandFoldValues[f] : kOutside;
        }
        scene.folds.emplace_back(std::move(p));
    }

    // Analytic inclusion of the band at each k, using the same float moments
    // the ensemble produces.
    double mean = 0.0;
    for (float v : kBandFoldValues) mean += static_cast<float>(v);
    mean /= kBandFoldValues.size();
    double var = 0.0;
    for (float v : kBandFoldValues) var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / kBandFoldValues.size());

    for (double k : scene.ks) {
        const bool band_in = spec.band_deg > 0.0 && std::clamp(mean + k * sd, 0.0, 1.0) >= threshold;
        scene.truth.push_back(band_in ? wide_truth : core_truth);
    }
    return scene;
}

}  // namespace vinv
