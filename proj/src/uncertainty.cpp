#include "vinv/uncertainty.hpp"

#include <algorithm>
#include <cmath>

namespace vinv {

std::string_view to_string(UncertaintyKind k) {
    switch (k) {
        case UncertaintyKind::Epistemic: return "epistemic";
        case UncertaintyKind::Aleatoric: return "aleatoric";
        case UncertaintyKind::MeanAleatoric: return "mean-aleatoric";
        case UncertaintyKind::Total: return "total";
    }
    return "unknown";
}

namespace {

void require_same_geometry(std::span<const ProbVolume> vols) {
    for (const auto& v : vols) {
        if (v.dims() != vols.front().dims() || v.channels() != vols.front().channels())
            throw UncertaintyError("geometry mismatch between volumes");
    }
}

ProbVolume like(const ProbVolume& ref, std::vector<double> values) {
    std::vector<float> data(values.size());
    std::transform(values.begin(), values.end(), data.begin(), [](double v) {
        return static_cast<float>(std::clamp(v, 0.0, 1.0));
    });
    return ProbVolume(ref.dims(), ref.channels(), ref.spacing(), std::move(data));
}

// Per-voxel mean and population std of `vols`, accumulated in input order.
std::pair<std::vector<double>, std::vector<double>> moments(std::span<const ProbVolume> vols) {
    const std::size_t n = vols.front().data().size();
    const double k = static_cast<double>(vols.size());
    std::vector<double> mean(n, 0.0), sd(n, 0.0);
    for (const auto& v : vols)
        for (std::size_t i = 0; i < n; ++i) mean[i] += v.data()[i];
    for (auto& m : mean) m /= k;
    for (const auto& v : vols)
        for (std::size_t i = 0; i < n; ++i) {
            const double d = v.data()[i] - mean[i];
            sd[i] += d * d;
        }
    for (auto& s : sd) s = std::sqrt(s / k);
    return {std::move(mean), std::move(sd)};
}

void require_samples(std::span<const SampleSet> folds) {
    if (folds.empty()) throw UncertaintyError("no folds given");
    for (const auto& s : folds) {
        if (s.empty()) throw UncertaintyError("empty sample set");
        require_same_geometry(s);
        if (s.front().dims() != folds.front().front().dims() ||
            s.front().channels() != folds.front().front().channels())
            throw UncertaintyError("geometry mismatch between folds");
    }
}

std::vector<ProbVolume> fold_means(std::span<const SampleSet> folds) {
    std::vector<ProbVolume> means;
    for (const auto& s : folds) means.push_back(like(s.front(), moments(s).first));
    return means;
}

}  // namespace

UncertaintyField fold_mean_std(std::span<const ProbVolume> folds) {
    if (folds.size() < 2) throw UncertaintyError("at least two folds are required");
    require_same_geometry(folds);
    auto [mean, sd] = moments(folds);
    return {like(folds.front(), std::move(mean)), like(folds.front(), std::move(sd)),
            UncertaintyKind::Epistemic};
}

ProbVolume aleatoric(std::span<const ProbVolume> samples) {
    if (samples.size() < 2) throw UncertaintyError("at least two samples are required");
    require_same_geometry(samples);
    return like(samples.front(), moments(samples).second);
}

ProbVolume mean_aleatoric(std::span<const SampleSet> folds) {
    require_samples(folds);
    const std::size_t n = folds.front().front().data().size();
    std::vector<double> acc(n, 0.0);
    for (const auto& s : folds) {
        if (s.size() < 2) throw UncertaintyError("at least two samples are required");
        const auto sd = moments(s).second;
        for (std::size_t i = 0; i < n; ++i) acc[i] += sd[i];
    }
    for (auto& a : acc) a /= static_cast<double>(folds.size());
    return like(folds.front().front(), std::move(acc));
}

ProbVolume epistemic_from_samples(std::span<const SampleSet> folds) {
    if (folds.size() < 2) throw UncertaintyError("at least two folds are required");
    require_samples(folds);
    const auto means = fold_means(folds);
    return like(means.front(), moments(means).second);
}

UncertaintyField ensemble_field(const FoldSet& folds) {
    if (folds.empty()) throw UncertaintyError("no folds given");
    const bool deterministic = std::holds_alternative<ProbVolume>(folds.front());
    for (const auto& f : folds)
        if (std::holds_alternative<ProbVolume>(f) != deterministic)
            throw UncertaintyError("cannot mix deterministic folds and sample sets");

    if (deterministic) {
        std::vector<ProbVolume> vols;
        for (const auto& f : folds) vols.push_back(std::get<ProbVolume>(f));
        return fold_mean_std(vols);
    }

    std::vector<SampleSet> sets;
    for (const auto& f : folds) sets.push_back(std::get<SampleSet>(f));
    const auto means = fold_means(sets);
    const ProbVolume ale = mean_aleatoric(sets);
    if (sets.size() == 1) return {means.front(), ale, UncertaintyKind::MeanAleatoric};

    auto [mean, epi] = moments(means);
    for (std::size_t i = 0; i < epi.size(); ++i) epi[i] += ale.data()[i];
    return {like(means.front(), std::move(mean)), like(means.front(), std::move(epi)),
            UncertaintyKind::Total};
}

MaskVolume sigma_level_mask(const UncertaintyField& f, double k, double threshold) {
    if (f.mean.dims() != f.std.dims() || f.mean.channels() != f.std.channels())
        throw UncertaintyError("mean and std geometry mismatch");
    const auto& m = f.mean.data();
    const auto& s = f.std.data();
    std::vector<std::uint8_t> out(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        const double v = std::clamp(static_cast<double>(m[i]) + k * static_cast<double>(s[i]), 0.0, 1.0);
        out[i] = v >= threshold ? 1 : 0;
    }
    return MaskVolume(f.mean.dims(), f.mean.channels(), f.mean.spacing(), std::move(out));
}

std::vector<SweepStep> uncertainty_sweep(const UncertaintyField& f, std::span<const double> ks,
                                         const SweepOptions& opts) {
    for (ChannelId id : {ChannelId::Tumor, ChannelId::Artery, ChannelId::Vein})
        if (!f.mean.has_channel(id))
            throw MissingChannelError("missing channel: " + std::string(channel_name(id)));

    std::vector<SweepStep> steps;
    for (double k : ks) {
        MaskVolume masks = sigma_level_mask(f, k, opts.threshold);
        if (opts.critical_filter) masks = filter_critical(masks, opts.filter_mode);
        SweepStep step;
        step.k = k;
        step.artery = scan_involvement(masks, VesselKind::Artery, opts.involvement);
        step.vein = scan_involvement(masks, VesselKind::Vein, opts.involvement);
        step.category = dpcg_classify(step.vein.max_span, step.artery.max_span);
        steps.push_back(std::move(step));
    }
    return steps;
}

}  // namespace vinv
