#include "vinv/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace vinv {

using nlohmann::json;

double round_to(double value, int decimals) {
    const double scale = std::pow(10.0, decimals);
    const double r = std::round(value * scale) / scale;
    return r == 0.0 ? 0.0 : r;  // no "-0"
}

namespace {

double deg(double v) { return round_to(v, 2); }
double ratio(double v) { return round_to(v, 6); }

json optional_index(const std::optional<std::size_t>& i) {
    return i ? json(*i) : json(nullptr);
}

}  // namespace

Assessment assess(std::string scan_id, const MaskVolume& masks, const AssessConfig& config) {
    Assessment a;
    a.scan_id = std::move(scan_id);
    const MaskVolume* input = &masks;
    MaskVolume filtered;
    if (config.critical) {
        filtered = filter_critical(masks, config.filter_mode);
        input = &filtered;
    }
    a.artery = scan_involvement(*input, VesselKind::Artery, config.involvement);
    a.vein = scan_involvement(*input, VesselKind::Vein, config.involvement);
    a.category = dpcg_classify(a.vein.max_span, a.artery.max_span);
    return a;
}

json config_json(const AssessConfig& c) {
    json ks = json::array();
    for (double k : c.ks) ks.push_back(round_to(k, 6));
    return {{"connectivity", static_cast<int>(c.involvement.connectivity)},
            {"span_method", to_string(c.involvement.span_method)},
            {"threshold", round_to(c.threshold, 6)},
            {"filter_mode", to_string(c.filter_mode)},
            {"critical", c.critical},
            {"ks", ks}};
}

json to_json(const InvolvementReport& r) {
    json slices = json::array();
    for (const auto& s : r.slices) {
        if (!s.presence) continue;
        json spans = json::array();
        for (const auto& cs : s.contacts) spans.push_back(deg(s.spans[cs.component]));
        slices.push_back({{"z", s.z},
                          {"max_span_deg", deg(s.max_span)},
                          {"component_spans_deg", spans},
                          {"contact_pixels", [&] {
                               std::size_t n = 0;
                               for (const auto& cs : s.contacts) n += cs.contacts.size();
                               return n;
                           }()}});
    }
    return {{"vessel", to_string(r.vessel)},
            {"presence", r.presence},
            {"max_span_deg", deg(r.max_span)},
            {"argmax_slice", optional_index(r.argmax_slice)},
            {"contact_slices", slices}};
}

json to_json(const SweepStep& s) {
    auto brief = [](const InvolvementReport& r) {
        return json{{"presence", r.presence},
                    {"max_span_deg", deg(r.max_span)},
                    {"argmax_slice", optional_index(r.argmax_slice)}};
    };
    return {{"k", round_to(s.k, 6)},
            {"artery", brief(s.artery)},
            {"vein", brief(s.vein)},
            {"dpcg_category", to_string(s.category)}};
}

json to_json(const Assessment& a, const AssessConfig& config) {
    json doc{{"schema", kAssessmentSchema},
             {"tool_version", kToolVersion},
             {"scan_id", a.scan_id},
             {"units", {{"angles", "deg"}}},
             {"config", config_json(config)},
             {"vessels", {{"artery", to_json(a.artery)}, {"vein", to_json(a.vein)}}},
             {"dpcg_category", to_string(a.category)}};
    if (!a.sweep.empty()) {
        json sweep = json::array();
        for (const auto& s : a.sweep) sweep.push_back(to_json(s));
        doc["sweep"] = sweep;
    }
    return doc;
}

json to_json(const Rate& r) {
    if (r.value) return ratio(*r.value);
    return {{"value", nullptr}, {"reason", r.reason}};
}

json to_json(const ConfusionCounts& c) {
    return {{"tp", c.tp}, {"fp", c.fp}, {"tn", c.tn}, {"fn", c.fn}};
}

namespace {

json optional_ratio(const std::optional<double>& v) { return v ? json(ratio(*v)) : json(nullptr); }

json rate_summary_json(const RateSummary& r) {
    return {{"pooled", to_json(r.pooled)},
            {"per_fold_mean", optional_ratio(r.per_fold_mean)},
            {"per_fold_std", optional_ratio(r.per_fold_std)}};
}

json confusion_json(const ConfusionSummary& c) {
    return {{"counts", to_json(c.counts)},
            {"sensitivity", rate_summary_json(c.sensitivity)},
            {"specificity", rate_summary_json(c.specificity)}};
}

json buckets_json(const std::array<BucketCell, 4>& cells) {
    json rows = json::array();
    for (std::size_t b = 0; b < cells.size(); ++b)
        rows.push_back({{"bucket", kBucketLabels[b]},
                        {"matched", cells[b].matched},
                        {"total", cells[b].total}});
    return rows;
}

json involvement_json(const InvolvementSummary& s) {
    return {{"artery", confusion_json(s.artery)},
            {"vein", confusion_json(s.vein)},
            {"scan", confusion_json(s.scan)},
            {"artery_r2", to_json(s.artery_r2)},
            {"vein_r2", to_json(s.vein_r2)},
            {"dpcg_buckets", {{"vein", buckets_json(s.buckets.vein)},
                              {"artery", buckets_json(s.buckets.artery)}}}};
}

json vessel_outcome_json(const VesselOutcome& v) {
    return {{"pred_presence", v.pred_presence},
            {"gt_presence", v.gt_presence},
            {"pred_max_deg", deg(v.pred_max)},
            {"gt_max_deg", deg(v.gt_max)},
            {"confusion", to_string(v.confusion)}};
}

}  // namespace

json to_json(const MetricsReport& m, const AssessConfig& config) {
    json dice = json::object();
    for (const auto& [name, s] : m.dice)
        dice[name] = {{"mean", ratio(s.mean)},
                      {"per_case_std", ratio(s.per_case_std)},
                      {"per_fold_std", optional_ratio(s.per_fold_std)},
                      {"n", s.n}};
    json scans = json::array();
    for (const auto& s : m.scans) {
        json d = json::object();
        for (const auto& [k, v] : s.dice) d[k] = ratio(v);
        json entry{{"id", s.id},
                   {"dice", d},
                   {"artery", vessel_outcome_json(s.artery)},
                   {"vein", vessel_outcome_json(s.vein)},
                   {"scan", to_string(s.scan)}};
        if (!s.fold.empty()) entry["fold"] = s.fold;
        if (s.critical)
            entry["critical"] = {{"artery", vessel_outcome_json(s.critical->artery)},
                                 {"vein", vessel_outcome_json(s.critical->vein)},
                                 {"scan", to_string(s.critical->scan)}};
        scans.push_back(entry);
    }
    json doc{{"schema", kMetricsSchema},
             {"tool_version", kToolVersion},
             {"units", {{"angles", "deg"}}},
             {"config", config_json(config)},
             {"scan_count", m.scans.size()},
             {"dice", dice},
             {"involvement", involvement_json(m.all)},
             {"scans", scans}};
    if (m.critical) doc["critical_involvement"] = involvement_json(*m.critical);
    return doc;
}

std::string metrics_table(const MetricsReport& m) {
    std::vector<std::pair<std::string, std::string>> rows;
    auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", v);
        return std::string(buf);
    };
    auto with_std = [&](double mean, const std::optional<double>& sd) {
        return sd ? fmt(mean) + " ± " + fmt(*sd) : fmt(mean);
    };
    auto rate = [&](const RateSummary& r) -> std::string {
        if (r.per_fold_mean) return with_std(*r.per_fold_mean, r.per_fold_std);
        return r.pooled.value ? fmt(*r.pooled.value) : std::string("n/a");
    };
    auto r2 = [&](const Rate& r) { return r.value ? fmt(*r.value) : std::string("n/a"); };
    auto dice_row = [&](const char* label, const char* key) {
        auto it = m.dice.find(key);
        rows.emplace_back(label, it == m.dice.end() ? "n/a" : with_std(it->second.mean, it->second.per_fold_std));
    };

    dice_row("Tumor Dice", "tumor");
    dice_row("Artery Dice", "artery");
    dice_row("Vein Dice", "vein");
    dice_row("Artery Overlap Dice", "artery_overlap");
    dice_row("Vein Overlap Dice", "vein_overlap");
    rows.emplace_back("Artery Sensitivity", rate(m.all.artery.sensitivity));
    rows.emplace_back("Artery Specificity", rate(m.all.artery.specificity));
    rows.emplace_back("Vein Sensitivity", rate(m.all.vein.sensitivity));
    rows.emplace_back("Vein Specificity", rate(m.all.vein.specificity));
    rows.emplace_back("Scan Sensitivity", rate(m.all.scan.sensitivity));
    rows.emplace_back("Scan Specificity", rate(m.all.scan.specificity));
    rows.emplace_back("Artery R²", r2(m.all.artery_r2));
    rows.emplace_back("Vein R²", r2(m.all.vein_r2));
    if (m.critical) {
        const auto& c = *m.critical;
        rows.emplace_back("SMA or Truncus Sensitivity", rate(c.artery.sensitivity));
        rows.emplace_back("SMA or Truncus Specificity", rate(c.artery.specificity));
        rows.emplace_back("SMV or PV Sensitivity", rate(c.vein.sensitivity));
        rows.emplace_back("SMV or PV Specificity", rate(c.vein.specificity));
        rows.emplace_back("Critical Scan Sensitivity", rate(c.scan.sensitivity));
        rows.emplace_back("Critical Scan Specificity", rate(c.scan.specificity));
        rows.emplace_back("Critical Artery R²", r2(c.artery_r2));
        rows.emplace_back("Critical Vein R²", r2(c.vein_r2));
    }
    const BucketTable& bt = m.critical ? m.critical->buckets : m.all.buckets;
    for (std::size_t b = 0; b < 4; ++b) {
        auto cell = [](const BucketCell& c) {
            return "(" + std::to_string(c.matched) + "/" + std::to_string(c.total) + ")";
        };
        rows.emplace_back(std::string(kBucketLabels[b]), cell(bt.vein[b]) + ", " + cell(bt.artery[b]));
    }

    // Width in code points so the multi-byte glyphs (°, ≤, ², ±) align.
    auto width = [](const std::string& s) {
        std::size_t n = 0;
        for (unsigned char ch : s) n += (ch & 0xC0) != 0x80;
        return n;
    };
    std::size_t label_w = std::string("Metric").size();
    for (const auto& [l, _] : rows) label_w = std::max(label_w, width(l));

    std::ostringstream out;
    out << std::string(label_w - 6, ' ') << "Metric | Value\n";
    out << std::string(label_w, '-') << "-+-" << std::string(16, '-') << '\n';
    for (const auto& [l, v] : rows) out << std::string(label_w - width(l), ' ') << l << " | " << v << '\n';
    return out.str();
}

json to_json(const LossRecord& r) {
    json doc{{"schema", kLossSchema},
             {"tool_version", kToolVersion},
             {"weights", {{"beta", round_to(r.weights.beta, 6)}, {"alpha_w", round_to(r.weights.alpha_w, 6)}}},
             {"bce", round_to(r.bce, 6)},
             {"dice", round_to(r.dice, 6)},
             {"overlap", round_to(r.overlap, 6)},
             {"combined", round_to(r.combined, 6)}};
    if (r.gradcheck) {
        const auto& g = *r.gradcheck;
        // Relative errors are far below 1e-6; keep them in scientific form.
        doc["gradcheck_max_rel_error"] = {{"bce", g[0]}, {"dice", g[1]}, {"overlap", g[2]}, {"combined", g[3]}};
    }
    return doc;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace vinv
