#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "vinv/evaluation.hpp"
#include "vinv/involvement.hpp"
#include "vinv/loss.hpp"
#include "vinv/uncertainty.hpp"
#include "vinv/volume.hpp"

namespace vinv {

inline constexpr std::string_view kToolVersion = "0.1.0";
inline constexpr std::string_view kAssessmentSchema = "vinv.assessment/1";
inline constexpr std::string_view kMetricsSchema = "vinv.metrics/1";
inline constexpr std::string_view kLossSchema = "vinv.loss/1";

/// Effective configuration, echoed into every document.
struct AssessConfig {
    InvolvementOptions involvement;
    double threshold = kDefaultMaskThreshold;
    FilterMode filter_mode = FilterMode::Voxel;
    bool critical = false;
    std::vector<double> ks = kDefaultSigmaSteps;
};

struct Assessment {
    std::string scan_id;
    InvolvementReport artery;
    InvolvementReport vein;
    DpcgCategory category = DpcgCategory::Resectable;
    std::vector<SweepStep> sweep;
};

/// Runs artery and vein involvement on `masks` (pancreas-filtered first when
/// config.critical is set).
Assessment assess(std::string scan_id, const MaskVolume& masks, const AssessConfig& config);

double round_to(double value, int decimals);

nlohmann::json config_json(const AssessConfig& config);
nlohmann::json to_json(const InvolvementReport& report);
nlohmann::json to_json(const SweepStep& step);
nlohmann::json to_json(const Assessment& a, const AssessConfig& config);

nlohmann::json to_json(const Rate& r);
nlohmann::json to_json(const ConfusionCounts& c);
nlohmann::json to_json(const MetricsReport& m, const AssessConfig& config);

/// Aligned two-column table using the metric row names of the results table.
std::string metrics_table(const MetricsReport& m);

struct LossRecord {
    double bce = 0.0;
    double dice = 0.0;
    double overlap = 0.0;
    double combined = 0.0;
    LossWeights weights;
    std::optional<std::array<double, 4>> gradcheck;  // bce, dice, overlap, combined
};

nlohmann::json to_json(const LossRecord& r);

/// JSON text with a trailing newline; byte-identical for identical input.
std::string dump(const nlohmann::json& j);

}  // namespace vinv
