#pragma once

#include <span>
#include <stdexcept>
#include <string_view>
#include <variant>
#include <vector>

#include "vinv/involvement.hpp"
#include "vinv/volume.hpp"

namespace vinv {

class UncertaintyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Probabilistic samples drawn from one model fold.
using SampleSet = std::vector<ProbVolume>;

/// One fold is either a single deterministic prediction or a sample set.
using FoldEntry = std::variant<ProbVolume, SampleSet>;
using FoldSet = std::vector<FoldEntry>;

enum class UncertaintyKind {
    Epistemic,      // spread of fold predictions
    Aleatoric,      // spread of samples within a fold
    MeanAleatoric,  // fold average of the aleatoric spread
    Total,          // mean aleatoric plus epistemic
};

std::string_view to_string(UncertaintyKind k);

struct UncertaintyField {
    ProbVolume mean;
    ProbVolume std;
    UncertaintyKind kind = UncertaintyKind::Epistemic;
};

/// Per-voxel mean and population standard deviation across folds.
UncertaintyField fold_mean_std(std::span<const ProbVolume> folds);

/// Per-voxel population standard deviation across samples (S >= 2).
ProbVolume aleatoric(std::span<const ProbVolume> samples);

/// Fold average of each fold's aleatoric field.
ProbVolume mean_aleatoric(std::span<const SampleSet> folds);

/// Population standard deviation across folds of the per-fold sample means.
ProbVolume epistemic_from_samples(std::span<const SampleSet> folds);

/// Mean prediction with the uncertainty appropriate to the fold contents:
/// deterministic folds give the epistemic field; sample folds give the mean
/// of fold means with mean aleatoric + epistemic spread. Mixed sets are
/// rejected.
UncertaintyField ensemble_field(const FoldSet& folds);

inline constexpr double kDefaultMaskThreshold = 0.5;
inline const std::vector<double> kDefaultSigmaSteps{-1.0, 0.0, 1.0, 2.0};

/// Voxel is set when clamp(mean + k * std, 0, 1) >= threshold.
MaskVolume sigma_level_mask(const UncertaintyField& f, double k,
                            double threshold = kDefaultMaskThreshold);

struct SweepStep {
    double k = 0.0;
    InvolvementReport artery;
    InvolvementReport vein;
    DpcgCategory category = DpcgCategory::Resectable;
};

struct SweepOptions {
    InvolvementOptions involvement;
    double threshold = kDefaultMaskThreshold;
    bool critical_filter = false;
    FilterMode filter_mode = FilterMode::Voxel;
};

std::vector<SweepStep> uncertainty_sweep(const UncertaintyField& f,
                                         std::span<const double> ks = kDefaultSigmaSteps,
                                         const SweepOptions& opts = {});

}  // namespace vinv
