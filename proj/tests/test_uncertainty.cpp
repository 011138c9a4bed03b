#include <doctest.h>

#include <cmath>
#include <random>

#include "vinv/phantom.hpp"
#include "vinv/uncertainty.hpp"

using namespace vinv;

namespace {

ProbVolume voxel(float v) { return ProbVolume({1, 1, 1}, {ChannelId::Tumor}, {1, 1, 1}, {v}); }

float value(const ProbVolume& p) { return p.data()[0]; }

}  // namespace

TEST_CASE("fold_mean_std") {
    SUBCASE("identical folds") {
        const std::vector<ProbVolume> folds(3, voxel(0.7f));
        CHECK(value(fold_mean_std(folds).std) == 0.0f);
    }
    SUBCASE("three-point population spread") {
        const std::vector<ProbVolume> folds{voxel(0.4f), voxel(0.6f), voxel(0.5f)};
        const auto f = fold_mean_std(folds);
        CHECK(value(f.mean) == doctest::Approx(0.5).epsilon(1e-6));
        CHECK(value(f.std) == doctest::Approx(0.0816497).epsilon(1e-5));
        CHECK(f.kind == UncertaintyKind::Epistemic);
    }
    SUBCASE("two-point symmetric") {
        const std::vector<ProbVolume> folds{voxel(0.0f), voxel(1.0f)};
        const auto f = fold_mean_std(folds);
        CHECK(value(f.mean) == doctest::Approx(0.5));
        CHECK(value(f.std) == doctest::Approx(0.5));
    }
    SUBCASE("single fold") {
        const std::vector<ProbVolume> folds{voxel(0.5f)};
        CHECK_THROWS_AS(fold_mean_std(folds), UncertaintyError);
    }
}

TEST_CASE("aleatoric") {
    const std::vector<ProbVolume> same(4, voxel(0.3f));
    CHECK(value(aleatoric(same)) == 0.0f);
    const std::vector<ProbVolume> pair{voxel(0.2f), voxel(0.8f)};
    CHECK(value(aleatoric(pair)) == doctest::Approx(0.3).epsilon(1e-6));
    const std::vector<ProbVolume> one{voxel(0.2f)};
    CHECK_THROWS_AS(aleatoric(one), UncertaintyError);
}

TEST_CASE("mean_aleatoric and epistemic_from_samples") {
    const SampleSet flat{voxel(0.5f), voxel(0.5f)};
    const SampleSet spread{voxel(0.2f), voxel(0.8f)};
    const std::vector<SampleSet> same{flat, flat};
    CHECK(value(mean_aleatoric(same)) == 0.0f);
    const std::vector<SampleSet> mixed{spread, flat, flat};
    CHECK(value(mean_aleatoric(mixed)) == doctest::Approx(0.1).epsilon(1e-6));
    const std::vector<SampleSet> single{spread};
    CHECK(value(mean_aleatoric(single)) == doctest::Approx(0.3).epsilon(1e-6));

    CHECK(value(epistemic_from_samples(mixed)) == doctest::Approx(0.0).epsilon(1e-6));
    const std::vector<SampleSet> means{{voxel(0.3f), voxel(0.5f)}, {voxel(0.6f), voxel(0.6f)}, {voxel(0.5f), voxel(0.5f)}};
    CHECK(value(epistemic_from_samples(means)) == doctest::Approx(0.0816497).epsilon(1e-5));
}

TEST_CASE("ensemble_field total is the sum of both spreads") {
    const FoldSet folds{SampleSet{voxel(0.3f), voxel(0.5f)}, SampleSet{voxel(0.6f), voxel(0.6f)},
                        SampleSet{voxel(0.5f), voxel(0.5f)}};
    const auto f = ensemble_field(folds);
    CHECK(f.kind == UncertaintyKind::Total);
    CHECK(value(f.mean) == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(value(f.std) == doctest::Approx(0.0816497 + 0.1 / 3.0).epsilon(1e-5));

    const FoldSet mixed{voxel(0.5f), SampleSet{voxel(0.5f), voxel(0.5f)}};
    CHECK_THROWS_AS(ensemble_field(mixed), UncertaintyError);
}

TEST_CASE("sigma_level_mask") {
    const UncertaintyField f{voxel(0.45f), voxel(0.1f), UncertaintyKind::Epistemic};
    CHECK(sigma_level_mask(f, 1.0).data()[0] == 1);
    CHECK(sigma_level_mask(f, 0.0).data()[0] == 0);
    CHECK(sigma_level_mask(f, -1.0).data()[0] == 0);

    const UncertaintyField flat{voxel(0.6f), voxel(0.0f), UncertaintyKind::Epistemic};
    for (double k : kDefaultSigmaSteps) CHECK(sigma_level_mask(flat, k).data()[0] == 1);
}

TEST_CASE("masks nest across increasing k") {
    std::mt19937 rng(8);
    std::uniform_real_distribution<float> m(0.0f, 1.0f), s(0.0f, 0.3f);
    const Dims d{2, 6, 6};
    for (int trial = 0; trial < 20; ++trial) {
        UncertaintyField f{ProbVolume(d, {ChannelId::Vein}, {1, 1, 1}), ProbVolume(d, {ChannelId::Vein}, {1, 1, 1}),
                           UncertaintyKind::Epistemic};
        for (auto& v : f.mean.data()) v = m(rng);
        for (auto& v : f.std.data()) v = s(rng);
        for (std::size_t a = 0; a + 1 < kDefaultSigmaSteps.size(); ++a) {
            const auto lo = sigma_level_mask(f, kDefaultSigmaSteps[a]);
            const auto hi = sigma_level_mask(f, kDefaultSigmaSteps[a + 1]);
            for (std::size_t i = 0; i < lo.data().size(); ++i) CHECK(lo.data()[i] <= hi.data()[i]);
        }
    }
}

TEST_CASE("uncertainty_sweep") {
    SUBCASE("zero spread gives identical steps") {
        PhantomSpec spec;
        spec.dims = {4, 64, 64};
        spec.center_row = spec.center_col = 32;
        spec.z_end = 4;
        spec.span_deg = 60.0;
        spec.band_deg = 0.0;
        const auto scene = gen_uncertainty_scene(spec);
        const auto field = ensemble_field(scene.folds);
        const auto steps = uncertainty_sweep(field);
        REQUIRE(steps.size() == 4);
        for (const auto& s : steps) {
            CHECK(s.vein.max_span == steps.front().vein.max_span);
            CHECK(s.category == steps.front().category);
        }
    }
    SUBCASE("borderline band flips the category at k = 2") {
        PhantomSpec spec;
        spec.dims = {4, 64, 64};
        spec.center_row = spec.center_col = 32;
        spec.z_end = 4;
        spec.span_deg = 60.0;
        spec.band_deg = 30.0;
        const auto scene = gen_uncertainty_scene(spec);
        const auto steps = uncertainty_sweep(ensemble_field(scene.folds));
        REQUIRE(steps.size() == 4);
        CHECK(steps[0].category == DpcgCategory::Resectable);
        CHECK(steps[1].category == DpcgCategory::Resectable);
        CHECK(steps[2].category == DpcgCategory::Resectable);
        CHECK(steps[3].category == DpcgCategory::BorderlineResectable);
        for (std::size_t i = 0; i < steps.size(); ++i) {
            CHECK(steps[i].category == scene.truth[i].category);
            CHECK(std::abs(steps[i].vein.max_span - scene.truth[i].max_span) <= 10.0);
        }
    }
    SUBCASE("missing vessel channel") {
        const UncertaintyField f{voxel(0.5f), voxel(0.1f), UncertaintyKind::Epistemic};
        CHECK_THROWS_AS(uncertainty_sweep(f), MissingChannelError);
    }
}
