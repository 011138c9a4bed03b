#include "vinv/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "vinv/raster.hpp"

namespace vinv {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Maps library exceptions onto the exit-code contract.
template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
    try {
        return fn();
    } catch (const MissingChannelError& e) {
        err << "error: " << e.what() << '\n';
        return kExitChannelError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitInputError;
    }
}

void require_involvement_channels(const MaskVolume& m) {
    for (ChannelId id : {ChannelId::Tumor, ChannelId::Artery, ChannelId::Vein})
        if (!m.has_channel(id))
            throw MissingChannelError("missing channel: " + std::string(channel_name(id)));
}

std::string zero_pad(std::size_t v, int width) {
    std::string s = std::to_string(v);
    return s.size() >= static_cast<std::size_t>(width) ? s : std::string(width - s.size(), '0') + s;
}

void write_contact_overlays(const fs::path& dir, const std::string& scan_id, const MaskVolume& masks,
                            const InvolvementReport& report) {
    fs::create_directories(dir);
    const auto tumor = masks.channel(ChannelId::Tumor);
    const auto vessel = masks.channel(channel_for(report.vessel));
    for (const auto& s : report.slices) {
        if (!s.presence) continue;
        const auto img = contact_overlay(slice_of(tumor, masks.dims(), s.z),
                                         slice_of(vessel, masks.dims(), s.z), s);
        write_ppm(img, dir / (scan_id + "_" + std::string(to_string(report.vessel)) + "_z" +
                              zero_pad(s.z, 3) + ".ppm"));
    }
}

void write_heatmaps(const fs::path& dir, const ProbVolume& std_field) {
    fs::create_directories(dir);
    const Dims& d = std_field.dims();
    for (std::size_t c = 0; c < std_field.channel_count(); ++c) {
        const auto ch = std_field.channel_at(c);
        for (std::size_t z = 0; z < d.z; ++z) {
            const auto slice = ch.subspan(z * d.slice_size(), d.slice_size());
            if (std::none_of(slice.begin(), slice.end(), [](float v) { return v >= kHeatmapFloor; }))
                continue;
            write_ppm(uncertainty_heatmap(slice, d.y, d.x),
                      dir / ("std_" + std::string(channel_name(std_field.channels()[c])) + "_z" +
                             zero_pad(z, 3) + ".ppm"));
        }
    }
}

void emit(const std::string& text, const std::optional<fs::path>& path, std::ostream& out) {
    if (path)
        write_text_atomic(*path, text);
    else
        out << text;
}

json truth_json(const PhantomTruth& t) {
    json spans = json::array();
    for (double s : t.slice_span) spans.push_back(round_to(s, 2));
    return {{"slice_span_deg", spans},
            {"max_span_deg", round_to(t.max_span, 2)},
            {"presence", t.presence},
            {"dpcg_category", to_string(t.category)}};
}

json spec_json(const PhantomSpec& s) {
    json j{{"dims", {s.dims.z, s.dims.y, s.dims.x}},
           {"vessel", to_string(s.vessel)},
           {"center", {s.center_row, s.center_col}},
           {"radius_px", s.radius},
           {"wrap_center_deg", s.wrap_center_deg},
           {"span_deg", s.span_deg},
           {"thickness_px", s.thickness},
           {"slices", {s.z_begin, s.z_end}},
           {"band_deg", s.band_deg}};
    if (s.pancreas)
        j["pancreas"] = {{"center", {s.pancreas->z, s.pancreas->row, s.pancreas->col}},
                         {"radii", {s.pancreas->rz, s.pancreas->rrow, s.pancreas->rcol}}};
    return j;
}

}  // namespace

void write_text_atomic(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary);
        if (!f) throw VolumeError("cannot write " + tmp.string());
        f << text;
        if (!f) throw VolumeError("failed writing " + tmp.string());
    }
    fs::rename(tmp, path);
}

MaskVolume load_masks(const fs::path& header, double threshold) {
    auto v = read_volume(header);
    if (auto* m = std::get_if<MaskVolume>(&v)) return std::move(*m);
    if (auto* l = std::get_if<LayeredLabelVolume>(&v)) return decode_layered(*l);
    const auto& p = std::get<ProbVolume>(v);
    std::vector<std::uint8_t> data(p.data().size());
    std::transform(p.data().begin(), p.data().end(), data.begin(),
                   [&](float x) { return static_cast<std::uint8_t>(x >= threshold ? 1 : 0); });
    return MaskVolume(p.dims(), p.channels(), p.spacing(), std::move(data));
}

FoldSet load_folds(const std::vector<fs::path>& inputs) {
    FoldSet folds;
    for (const auto& in : inputs) {
        if (fs::is_directory(in)) {
            std::vector<fs::path> headers;
            for (const auto& e : fs::directory_iterator(in))
                if (e.path().extension() == ".json") headers.push_back(e.path());
            std::sort(headers.begin(), headers.end());
            if (headers.empty()) throw VolumeError("no sample volumes in " + in.string());
            SampleSet samples;
            for (const auto& h : headers) samples.push_back(read_prob(h));
            folds.emplace_back(std::move(samples));
        } else {
            folds.emplace_back(read_prob(in));
        }
    }
    return folds;
}

// --- assess --------------------------------------------------------------------

int cmd_assess(const AssessArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const MaskVolume masks = load_masks(args.input, args.config.threshold);
        require_involvement_channels(masks);
        const std::string id = args.scan_id.empty() ? args.input.stem().string() : args.scan_id;
        Assessment a = assess(id, masks, args.config);

        if (!args.folds.empty()) {
            const auto field = ensemble_field(load_folds(args.folds));
            SweepOptions so{args.config.involvement, args.config.threshold, args.config.critical,
                            args.config.filter_mode};
            a.sweep = uncertainty_sweep(field, args.config.ks, so);
        }
        if (args.overlay_dir) {
            const MaskVolume shown = args.config.critical ? filter_critical(masks, args.config.filter_mode) : masks;
            write_contact_overlays(*args.overlay_dir, id, shown, a.artery);
            write_contact_overlays(*args.overlay_dir, id, shown, a.vein);
        }
        emit(dump(to_json(a, args.config)), args.out, out);
        return kExitOk;
    });
}

// --- evaluate ------------------------------------------------------------------

namespace {

struct ManifestEntry {
    std::string id;
    fs::path pred;
    fs::path gt;
    std::optional<fs::path> gt_critical;
    std::string fold;
};

std::vector<ManifestEntry> read_manifest(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw VolumeError("cannot open manifest: " + path.string());
    const fs::path base = path.parent_path();
    auto resolve = [&](const std::string& p) {
        fs::path q(p);
        return q.is_absolute() ? q : base / q;
    };
    std::vector<ManifestEntry> entries;
    std::set<std::string> ids;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const json j = json::parse(line);
            ManifestEntry e;
            e.id = j.at("id").get<std::string>();
            e.pred = resolve(j.at("pred").get<std::string>());
            e.gt = resolve(j.at("gt").get<std::string>());
            if (j.contains("gt_critical") && !j.at("gt_critical").is_null())
                e.gt_critical = resolve(j.at("gt_critical").get<std::string>());
            if (j.contains("fold")) e.fold = j.at("fold").is_string() ? j.at("fold").get<std::string>()
                                                                      : j.at("fold").dump();
            if (!ids.insert(e.id).second) throw VolumeError("duplicate scan id: " + e.id);
            entries.push_back(std::move(e));
        } catch (const json::exception& ex) {
            throw VolumeError("manifest line " + std::to_string(lineno) + ": " + ex.what());
        }
    }
    return entries;
}

// Critical GT: artery/vein channels of the aggregate file, tumor from the GT.
MaskVolume critical_gt(const MaskVolume& gt, const MaskVolume& aggregate) {
    if (aggregate.dims() != gt.dims()) throw VolumeError("critical GT geometry mismatch");
    MaskVolume out(gt.dims(), {ChannelId::Tumor, ChannelId::Artery, ChannelId::Vein}, gt.spacing());
    const auto tumor = aggregate.has_channel(ChannelId::Tumor) ? aggregate.channel(ChannelId::Tumor)
                                                               : gt.channel(ChannelId::Tumor);
    std::copy(tumor.begin(), tumor.end(), out.channel(ChannelId::Tumor).begin());
    for (ChannelId id : {ChannelId::Artery, ChannelId::Vein}) {
        const auto src = aggregate.channel(id);
        std::copy(src.begin(), src.end(), out.channel(id).begin());
    }
    return out;
}

}  // namespace

int cmd_evaluate(const EvaluateArgs& args, std::ostream& out, std::ostream& err) {
    std::vector<ManifestEntry> entries;
    if (int rc = guarded(err, [&] {
            entries = read_manifest(args.manifest);
            return kExitOk;
        });
        rc != kExitOk)
        return rc;

    EvalOptions opts{args.config.involvement, args.config.filter_mode};
    std::vector<ScanResult> results;
    json failures = json::array();
    for (const auto& e : entries) {
        try {
            const MaskVolume pred = load_masks(e.pred, args.config.threshold);
            const MaskVolume gt = load_masks(e.gt, args.config.threshold);
            require_involvement_channels(pred);
            require_involvement_channels(gt);
            std::optional<MaskVolume> crit;
            if (args.config.critical) {
                if (!e.gt_critical) throw VolumeError("no gt_critical path for scan " + e.id);
                crit = critical_gt(gt, load_masks(*e.gt_critical, args.config.threshold));
            }
            ScanResult r = evaluate_scan(e.id, pred, gt, crit ? &*crit : nullptr, opts);
            r.fold = e.fold;
            results.push_back(std::move(r));
        } catch (const std::exception& ex) {
            err << "error: scan " << e.id << ": " << ex.what() << '\n';
            failures.push_back({{"id", e.id}, {"error", ex.what()}});
        }
    }

    int rc = kExitOk;
    guarded(err, [&] {
        const MetricsReport report = aggregate(std::move(results));
        json doc = to_json(report, args.config);
        doc["failures"] = failures;
        emit(dump(doc), args.out, out);
        if (args.table)
            write_text_atomic(*args.table, metrics_table(report));
        else if (args.out)
            out << metrics_table(report);
        return kExitOk;
    });
    if (!failures.empty()) rc = kExitPartialFailure;
    return rc;
}

// --- uncertainty ---------------------------------------------------------------

int cmd_uncertainty(const UncertaintyArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const FoldSet folds = load_folds(args.inputs);
        if (folds.size() == 1 && std::holds_alternative<ProbVolume>(folds.front()))
            throw UncertaintyError("a single deterministic fold has no standard deviation");
        const UncertaintyField field = ensemble_field(folds);

        fs::create_directories(args.out_dir);
        write_volume(field.mean, args.out_dir / "mean.json");
        write_volume(field.std, args.out_dir / "std.json");
        if (args.overlay_dir) write_heatmaps(*args.overlay_dir, field.std);

        json docs = json::array();
        if (args.sweep) {
            SweepOptions so{args.config.involvement, args.config.threshold, args.config.critical,
                            args.config.filter_mode};
            for (const auto& step : uncertainty_sweep(field, args.config.ks, so)) {
                Assessment a{args.scan_id, step.artery, step.vein, step.category, {}};
                json doc = to_json(a, args.config);
                doc["k"] = round_to(step.k, 6);
                doc["uncertainty_kind"] = to_string(field.kind);
                docs.push_back(doc);
            }
            write_text_atomic(args.out_dir / "sweep.json", dump(docs));
        }
        out << dump(docs);
        return kExitOk;
    });
}

// --- loss ------------------------------------------------------------------------

int cmd_loss(const LossArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const ProbVolume pv = read_prob(args.pred);
        const MaskVolume gv = read_masks_any(args.gt);
        if (pv.dims() != gv.dims()) throw VolumeError("prediction and GT geometry mismatch");
        // GT reordered to the prediction's channel order.
        std::vector<double> gt_values;
        gt_values.reserve(pv.data().size());
        for (ChannelId id : pv.channels()) {
            const auto ch = gv.channel(id);
            gt_values.insert(gt_values.end(), ch.begin(), ch.end());
        }
        const Tensor pred = Tensor::from_volume(pv);
        const Tensor gt(pv.channels(), pv.dims(), std::move(gt_values));
        for (ChannelId id : {ChannelId::Tumor, ChannelId::Artery, ChannelId::Vein})
            if (!pv.has_channel(id))
                throw MissingChannelError("missing channel: " + std::string(channel_name(id)));

        LossRecord rec;
        rec.weights = args.weights;
        rec.bce = bce(pred, gt);
        rec.dice = soft_dice_loss(pred, gt);
        rec.overlap = overlap_loss(pred, gt);
        rec.combined = combined_loss(pred, gt, args.weights);
        if (args.gradcheck) {
            const Tensor point = gradcheck_interior(pred);
            std::array<double, 4> g{};
            const std::array<LossKind, 4> kinds{LossKind::Bce, LossKind::Dice, LossKind::Overlap,
                                                LossKind::Combined};
            for (std::size_t i = 0; i < kinds.size(); ++i)
                g[i] = gradcheck(kinds[i], point, gt, args.weights, kGradcheckStep, args.gradcheck_entries);
            rec.gradcheck = g;
        }
        emit(dump(to_json(rec)), args.out, out);
        return kExitOk;
    });
}

// --- phantom ---------------------------------------------------------------------

int cmd_phantom(const PhantomArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        fs::create_directories(args.out_dir);
        switch (args.kind) {
            case PhantomKind::Wrap: {
                auto [masks, truth] = gen_wrap_scene(args.spec);
                if (args.layered)
                    write_volume(encode_layered(masks), args.out_dir / "scene.json");
                else
                    write_volume(masks, args.out_dir / "scene.json");
                json t = truth_json(truth);
                t["spec"] = spec_json(args.spec);
                write_text_atomic(args.out_dir / "truth.json", dump(t));
                out << dump(t);
                break;
            }
            case PhantomKind::Suite: {
                const auto suite = gen_confusion_suite(args.seed, args.count);
                std::string manifest;
                ConfusionCounts artery, vein, scan;
                json labels = json::array();
                for (const auto& s : suite) {
                    write_volume(s.pred, args.out_dir / (s.id + "_pred.json"));
                    write_volume(s.gt, args.out_dir / (s.id + "_gt.json"));
                    manifest += json{{"id", s.id}, {"pred", s.id + "_pred.json"}, {"gt", s.id + "_gt.json"}}.dump() + "\n";
                    artery.add(s.artery);
                    vein.add(s.vein);
                    scan.add(s.scan);
                    labels.push_back({{"id", s.id},
                                      {"artery", to_string(s.artery)},
                                      {"vein", to_string(s.vein)},
                                      {"scan", to_string(s.scan)}});
                }
                write_text_atomic(args.out_dir / "manifest.jsonl", manifest);
                json expected{{"seed", args.seed},
                              {"artery", to_json(artery)},
                              {"vein", to_json(vein)},
                              {"scan", to_json(scan)},
                              {"scenes", labels}};
                write_text_atomic(args.out_dir / "expected.json", dump(expected));
                out << dump(expected);
                break;
            }
            case PhantomKind::Uncertainty: {
                const auto scene = gen_uncertainty_scene(args.spec);
                for (std::size_t f = 0; f < scene.folds.size(); ++f)
                    write_volume(std::get<ProbVolume>(scene.folds[f]),
                                 args.out_dir / ("fold_" + std::to_string(f) + ".json"));
                json per_k = json::array();
                for (std::size_t i = 0; i < scene.ks.size(); ++i) {
                    json t = truth_json(scene.truth[i]);
                    t["k"] = scene.ks[i];
                    per_k.push_back(t);
                }
                json t{{"spec", spec_json(args.spec)}, {"per_k", per_k}};
                write_text_atomic(args.out_dir / "truth.json", dump(t));
                out << dump(t);
                break;
            }
        }
        return kExitOk;
    });
}

}  // namespace vinv
