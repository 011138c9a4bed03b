#include "vinv/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace vinv {

double dice(std::span<const std::uint8_t> pred, std::span<const std::uint8_t> gt) {
    if (pred.size() != gt.size()) throw EvaluationError("dice: geometry mismatch");
    std::size_t inter = 0, sp = 0, sg = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const bool p = pred[i] != 0, g = gt[i] != 0;
        inter += p && g;
        sp += p;
        sg += g;
    }
    if (sp + sg == 0) return 1.0;
    return 2.0 * static_cast<double>(inter) / static_cast<double>(sp + sg);
}

std::string_view to_string(Confusion c) {
    switch (c) {
        case Confusion::TP: return "TP";
        case Confusion::FP: return "FP";
        case Confusion::TN: return "TN";
        case Confusion::FN: return "FN";
    }
    return "?";
}

Confusion involvement_confusion(bool pred_presence, bool gt_presence) {
    if (pred_presence) return gt_presence ? Confusion::TP : Confusion::FP;
    return gt_presence ? Confusion::FN : Confusion::TN;
}

Confusion scan_confusion(bool pred_artery, bool pred_vein, bool gt_artery, bool gt_vein) {
    return involvement_confusion(pred_artery || pred_vein, gt_artery || gt_vein);
}

void ConfusionCounts::add(Confusion c) {
    switch (c) {
        case Confusion::TP: ++tp; break;
        case Confusion::FP: ++fp; break;
        case Confusion::TN: ++tn; break;
        case Confusion::FN: ++fn; break;
    }
}

ConfusionCounts& ConfusionCounts::operator+=(const ConfusionCounts& o) {
    tp += o.tp;
    fp += o.fp;
    tn += o.tn;
    fn += o.fn;
    return *this;
}

SensSpec sensitivity_specificity(const ConfusionCounts& c) {
    SensSpec out;
    if (c.tp + c.fn > 0)
        out.sensitivity.value = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    else
        out.sensitivity.reason = "no ground-truth positives (tp + fn = 0)";
    if (c.tn + c.fp > 0)
        out.specificity.value = static_cast<double>(c.tn) / static_cast<double>(c.tn + c.fp);
    else
        out.specificity.reason = "no ground-truth negatives (tn + fp = 0)";
    return out;
}

double r_squared(std::span<const double> gt, std::span<const double> pred) {
    if (gt.size() != pred.size()) throw EvaluationError("r_squared: length mismatch");
    if (gt.size() < 2) throw EvaluationError("r_squared: need at least two pairs");
    double mean = 0.0;
    for (double y : gt) mean += y;
    mean /= static_cast<double>(gt.size());
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < gt.size(); ++i) {
        ss_res += (gt[i] - pred[i]) * (gt[i] - pred[i]);
        ss_tot += (gt[i] - mean) * (gt[i] - mean);
    }
    if (ss_tot == 0.0) throw EvaluationError("r_squared: ground truth has zero variance");
    return 1.0 - ss_res / ss_tot;
}

DpcgBucket bucket_of(double degrees) {
    if (!(degrees >= 0.0 && degrees <= 360.0))
        throw EvaluationError("bucket_of: degrees must lie in [0,360]");
    if (degrees == 0.0) return DpcgBucket::None;
    if (degrees <= 90.0) return DpcgBucket::UpTo90;
    if (degrees <= 270.0) return DpcgBucket::UpTo270;
    return DpcgBucket::Above270;
}

std::array<BucketCell, 4> bucket_counts(std::span<const DegreePair> pairs) {
    std::array<BucketCell, 4> cells{};
    for (const auto& p : pairs) {
        const auto g = static_cast<std::size_t>(bucket_of(p.gt));
        ++cells[g].total;
        if (bucket_of(p.pred) == static_cast<DpcgBucket>(g)) ++cells[g].matched;
    }
    return cells;
}

BucketTable dpcg_bucket_table(std::span<const DegreePair> vein, std::span<const DegreePair> artery) {
    return {bucket_counts(vein), bucket_counts(artery)};
}

namespace {

VesselOutcome vessel_outcome(const InvolvementReport& pred, const InvolvementReport& gt) {
    return {pred.presence, gt.presence, pred.max_span, gt.max_span,
            involvement_confusion(pred.presence, gt.presence)};
}

std::vector<std::uint8_t> overlap_of(const MaskVolume& m, ChannelId vessel) {
    const auto t = m.channel(ChannelId::Tumor);
    const auto v = m.channel(vessel);
    std::vector<std::uint8_t> out(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) out[i] = t[i] & v[i];
    return out;
}

}  // namespace

CriticalOutcome critical_vessel_eval(const MaskVolume& pred, const MaskVolume& gt_critical,
                                     std::span<const std::uint8_t> pancreas,
                                     const EvalOptions& opts) {
    if (pred.dims() != gt_critical.dims()) throw EvaluationError("critical: geometry mismatch");
    if (pancreas.size() != pred.dims().voxels())
        throw EvaluationError("critical: pancreas geometry mismatch");
    MaskVolume filtered = pred;
    for (ChannelId id : {ChannelId::Artery, ChannelId::Vein}) {
        auto f = filter_critical(pred.channel(id), pancreas, pred.dims(), opts.filter_mode);
        std::copy(f.begin(), f.end(), filtered.channel(id).begin());
    }
    CriticalOutcome out;
    out.artery = vessel_outcome(scan_involvement(filtered, VesselKind::Artery, opts.involvement),
                                scan_involvement(gt_critical, VesselKind::Artery, opts.involvement));
    out.vein = vessel_outcome(scan_involvement(filtered, VesselKind::Vein, opts.involvement),
                              scan_involvement(gt_critical, VesselKind::Vein, opts.involvement));
    out.scan = scan_confusion(out.artery.pred_presence, out.vein.pred_presence,
                              out.artery.gt_presence, out.vein.gt_presence);
    return out;
}

CriticalOutcome critical_vessel_eval(const MaskVolume& pred, const MaskVolume& gt_critical,
                                     const EvalOptions& opts) {
    return critical_vessel_eval(pred, gt_critical, pred.channel(ChannelId::Pancreas), opts);
}

ScanResult evaluate_scan(std::string id, const MaskVolume& pred, const MaskVolume& gt,
                         const MaskVolume* gt_critical, const EvalOptions& opts) {
    if (pred.dims() != gt.dims()) throw EvaluationError("prediction and GT geometry mismatch");
    ScanResult r;
    r.id = std::move(id);

    for (ChannelId c : kBaseChannels) {
        if (pred.has_channel(c) && gt.has_channel(c))
            r.dice[std::string(channel_name(c))] = dice(pred.channel(c), gt.channel(c));
    }
    r.dice["artery_overlap"] =
        dice(overlap_of(pred, ChannelId::Artery), overlap_of(gt, ChannelId::Artery));
    r.dice["vein_overlap"] = dice(overlap_of(pred, ChannelId::Vein), overlap_of(gt, ChannelId::Vein));

    r.artery = vessel_outcome(scan_involvement(pred, VesselKind::Artery, opts.involvement),
                              scan_involvement(gt, VesselKind::Artery, opts.involvement));
    r.vein = vessel_outcome(scan_involvement(pred, VesselKind::Vein, opts.involvement),
                            scan_involvement(gt, VesselKind::Vein, opts.involvement));
    r.scan = scan_confusion(r.artery.pred_presence, r.vein.pred_presence, r.artery.gt_presence,
                            r.vein.gt_presence);
    if (gt_critical) r.critical = critical_vessel_eval(pred, *gt_critical, opts);
    return r;
}

namespace {

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double pop_std(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size()));
}

std::vector<std::string> fold_tags(const std::vector<ScanResult>& scans) {
    std::set<std::string> tags;
    for (const auto& s : scans)
        if (!s.fold.empty()) tags.insert(s.fold);
    return {tags.begin(), tags.end()};
}

Rate r2_rate(const std::vector<DegreePair>& pairs) {
    std::vector<double> g, p;
    for (const auto& x : pairs) {
        g.push_back(x.gt);
        p.push_back(x.pred);
    }
    try {
        return {r_squared(g, p), {}};
    } catch (const EvaluationError& e) {
        return {std::nullopt, e.what()};
    }
}

template <typename Pick>
ConfusionSummary confusion_summary(const std::vector<ScanResult>& scans,
                                   const std::vector<std::string>& folds, Pick pick) {
    ConfusionSummary out;
    for (const auto& s : scans) out.counts.add(pick(s));
    const auto pooled = sensitivity_specificity(out.counts);
    out.sensitivity.pooled = pooled.sensitivity;
    out.specificity.pooled = pooled.specificity;
    if (folds.size() >= 2) {
        std::vector<double> sens, spec;
        for (const auto& f : folds) {
            ConfusionCounts c;
            for (const auto& s : scans)
                if (s.fold == f) c.add(pick(s));
            const auto ss = sensitivity_specificity(c);
            if (ss.sensitivity.value) sens.push_back(*ss.sensitivity.value);
            if (ss.specificity.value) spec.push_back(*ss.specificity.value);
        }
        if (!sens.empty()) {
            out.sensitivity.per_fold_mean = mean_of(sens);
            out.sensitivity.per_fold_std = pop_std(sens);
        }
        if (!spec.empty()) {
            out.specificity.per_fold_mean = mean_of(spec);
            out.specificity.per_fold_std = pop_std(spec);
        }
    }
    return out;
}

template <typename PickArtery, typename PickVein, typename PickScan>
InvolvementSummary involvement_summary(const std::vector<ScanResult>& scans,
                                       const std::vector<std::string>& folds, PickArtery artery,
                                       PickVein vein, PickScan scan) {
    InvolvementSummary out;
    out.artery = confusion_summary(scans, folds, [&](const ScanResult& s) { return artery(s).confusion; });
    out.vein = confusion_summary(scans, folds, [&](const ScanResult& s) { return vein(s).confusion; });
    out.scan = confusion_summary(scans, folds, scan);
    std::vector<DegreePair> ap, vp;
    for (const auto& s : scans) {
        ap.push_back({artery(s).gt_max, artery(s).pred_max});
        vp.push_back({vein(s).gt_max, vein(s).pred_max});
    }
    out.artery_r2 = r2_rate(ap);
    out.vein_r2 = r2_rate(vp);
    out.buckets = dpcg_bucket_table(vp, ap);
    return out;
}

}  // namespace

MetricsReport aggregate(std::vector<ScanResult> scans) {
    std::sort(scans.begin(), scans.end(),
              [](const ScanResult& a, const ScanResult& b) { return a.id < b.id; });
    MetricsReport report;
    const auto folds = fold_tags(scans);

    std::set<std::string> names;
    for (const auto& s : scans)
        for (const auto& [k, _] : s.dice) names.insert(k);
    for (const auto& name : names) {
        std::vector<double> values;
        for (const auto& s : scans)
            if (auto it = s.dice.find(name); it != s.dice.end()) values.push_back(it->second);
        Summary sum{mean_of(values), pop_std(values), std::nullopt, values.size()};
        if (folds.size() >= 2) {
            std::vector<double> fold_means;
            for (const auto& f : folds) {
                std::vector<double> fv;
                for (const auto& s : scans)
                    if (s.fold == f)
                        if (auto it = s.dice.find(name); it != s.dice.end()) fv.push_back(it->second);
                if (!fv.empty()) fold_means.push_back(mean_of(fv));
            }
            sum.per_fold_std = pop_std(fold_means);
        }
        report.dice[name] = sum;
    }

    report.all = involvement_summary(
        scans, folds, [](const ScanResult& s) -> const VesselOutcome& { return s.artery; },
        [](const ScanResult& s) -> const VesselOutcome& { return s.vein; },
        [](const ScanResult& s) { return s.scan; });

    const bool any_critical =
        std::any_of(scans.begin(), scans.end(), [](const ScanResult& s) { return s.critical.has_value(); });
    if (any_critical) {
        std::vector<ScanResult> crit;
        for (const auto& s : scans)
            if (s.critical) crit.push_back(s);
        report.critical = involvement_summary(
            crit, fold_tags(crit),
            [](const ScanResult& s) -> const VesselOutcome& { return s.critical->artery; },
            [](const ScanResult& s) -> const VesselOutcome& { return s.critical->vein; },
            [](const ScanResult& s) { return s.critical->scan; });
    }
    report.scans = std::move(scans);
    return report;
}

}  // namespace vinv
