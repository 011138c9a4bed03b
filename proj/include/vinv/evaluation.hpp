#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vinv/involvement.hpp"
#include "vinv/volume.hpp"

namespace vinv {

class EvaluationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// 2|P & G| / (|P| + |G|), 1.0 when both are empty.
double dice(std::span<const std::uint8_t> pred, std::span<const std::uint8_t> gt);

enum class Confusion { TP, FP, TN, FN };

std::string_view to_string(Confusion c);

/// Presence-only rule: any predicted involvement counts as TP when the GT
/// has involvement anywhere, regardless of location.
Confusion involvement_confusion(bool pred_presence, bool gt_presence);

/// Scan level: presence is the OR over artery and vein.
Confusion scan_confusion(bool pred_artery, bool pred_vein, bool gt_artery, bool gt_vein);

struct ConfusionCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;

    void add(Confusion c);
    std::size_t total() const { return tp + fp + tn + fn; }
    ConfusionCounts& operator+=(const ConfusionCounts& o);
    bool operator==(const ConfusionCounts&) const = default;
};

/// A ratio that may be undefined (zero denominator); `reason` explains why.
struct Rate {
    std::optional<double> value;
    std::string reason;
};

struct SensSpec {
    Rate sensitivity;
    Rate specificity;
};

SensSpec sensitivity_specificity(const ConfusionCounts& c);

/// 1 - SS_res / SS_tot. Throws on length mismatch, fewer than two pairs or
/// zero GT variance.
double r_squared(std::span<const double> gt_degrees, std::span<const double> pred_degrees);

enum class DpcgBucket { None = 0, UpTo90 = 1, UpTo270 = 2, Above270 = 3 };

inline constexpr std::array<std::string_view, 4> kBucketLabels{
    "0° = Involvement", "0° < Involvement ≤ 90°", "90° < Involvement ≤ 270°",
    "270° < Involvement"};

DpcgBucket bucket_of(double degrees);

struct DegreePair {
    double gt = 0.0;
    double pred = 0.0;
};

struct BucketCell {
    std::size_t matched = 0;
    std::size_t total = 0;
    bool operator==(const BucketCell&) const = default;
};

struct BucketTable {
    std::array<BucketCell, 4> vein{};
    std::array<BucketCell, 4> artery{};
};

/// Counts, per GT bucket, how many predictions fall into the same bucket.
std::array<BucketCell, 4> bucket_counts(std::span<const DegreePair> pairs);
BucketTable dpcg_bucket_table(std::span<const DegreePair> vein, std::span<const DegreePair> artery);

struct EvalOptions {
    InvolvementOptions involvement;
    FilterMode filter_mode = FilterMode::Voxel;
};

struct VesselOutcome {
    bool pred_presence = false;
    bool gt_presence = false;
    double pred_max = 0.0;
    double gt_max = 0.0;
    Confusion confusion = Confusion::TN;
};

struct CriticalOutcome {
    VesselOutcome artery;
    VesselOutcome vein;
    Confusion scan = Confusion::TN;
};

/// Removes predicted artery/vein voxels overlapping `pancreas`, recomputes
/// presence and compares with `gt_critical`, whose Artery/Vein channels hold
/// the critical-vessel aggregates (SMA + truncus, SMV + PV) next to Tumor.
CriticalOutcome critical_vessel_eval(const MaskVolume& pred, const MaskVolume& gt_critical,
                                     std::span<const std::uint8_t> pancreas,
                                     const EvalOptions& opts = {});

/// Critical evaluation using the predicted pancreas channel.
CriticalOutcome critical_vessel_eval(const MaskVolume& pred, const MaskVolume& gt_critical,
                                     const EvalOptions& opts = {});

/// Names of the Dice rows, in report order.
inline constexpr std::array<std::string_view, 5> kDiceRows{
    "tumor", "artery", "vein", "artery_overlap", "vein_overlap"};

struct ScanResult {
    std::string id;
    std::string fold;  // empty when untagged
    std::map<std::string, double> dice;
    VesselOutcome artery;
    VesselOutcome vein;
    Confusion scan = Confusion::TN;
    std::optional<CriticalOutcome> critical;
};

ScanResult evaluate_scan(std::string id, const MaskVolume& pred, const MaskVolume& gt,
                         const MaskVolume* gt_critical = nullptr, const EvalOptions& opts = {});

struct Summary {
    double mean = 0.0;
    double per_case_std = 0.0;
    std::optional<double> per_fold_std;  // set when scans carry >= 2 fold tags
    std::size_t n = 0;
};

struct RateSummary {
    Rate pooled;
    std::optional<double> per_fold_mean;
    std::optional<double> per_fold_std;
};

struct ConfusionSummary {
    ConfusionCounts counts;
    RateSummary sensitivity;
    RateSummary specificity;
};

struct InvolvementSummary {
    ConfusionSummary artery;
    ConfusionSummary vein;
    ConfusionSummary scan;
    Rate artery_r2;
    Rate vein_r2;
    BucketTable buckets;
};

struct MetricsReport {
    std::vector<ScanResult> scans;
    std::map<std::string, Summary> dice;
    InvolvementSummary all;
    std::optional<InvolvementSummary> critical;
};

/// Merges scan results; scans are ordered by id so the result does not
/// depend on input order.
MetricsReport aggregate(std::vector<ScanResult> scans);

}  // namespace vinv
