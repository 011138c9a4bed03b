#include <doctest.h>

#include "vinv/evaluation.hpp"
#include "vinv/phantom.hpp"

using namespace vinv;

namespace {

std::vector<DegreePair> table_two_vein_pairs() {
    std::vector<DegreePair> pairs;
    for (int i = 0; i < 19; ++i) pairs.push_back({0.0, 0.0});
    for (int i = 0; i < 5; ++i) pairs.push_back({45.0 + i, 60.0});
    for (int i = 0; i < 7; ++i) pairs.push_back({120.0 + 10 * i, 60.0});
    pairs.push_back({300.0, 310.0});
    return pairs;
}

}  // namespace

TEST_CASE("dice") {
    const std::vector<std::uint8_t> a{1, 1, 1, 1, 0, 0}, b{0, 0, 1, 1, 1, 1}, c{0, 0, 0, 0, 1, 1};
    const std::vector<std::uint8_t> d{1, 1, 0, 0, 0, 0}, empty(6, 0);
    CHECK(dice(a, a) == 1.0);
    CHECK(dice(d, c) == 0.0);
    CHECK(dice(a, b) == 0.5);
    CHECK(dice(empty, empty) == 1.0);
    CHECK_THROWS_AS(dice(a, std::vector<std::uint8_t>(3)), EvaluationError);
}

TEST_CASE("confusion rules") {
    CHECK(involvement_confusion(true, true) == Confusion::TP);
    CHECK(involvement_confusion(false, false) == Confusion::TN);
    CHECK(involvement_confusion(true, false) == Confusion::FP);
    CHECK(involvement_confusion(false, true) == Confusion::FN);

    CHECK(scan_confusion(true, false, true, false) == Confusion::TP);
    CHECK(scan_confusion(false, false, false, false) == Confusion::TN);
    CHECK(scan_confusion(false, true, true, false) == Confusion::TP);
}

TEST_CASE("contact in the wrong slice still counts as a true positive") {
    PhantomSpec spec;
    spec.dims = {10, 48, 48};
    spec.center_row = spec.center_col = 24;
    spec.span_deg = 90.0;
    spec.z_begin = 1;
    spec.z_end = 2;
    auto [pred, t1] = gen_wrap_scene(spec);
    spec.z_begin = 7;
    spec.z_end = 8;
    auto [gt, t2] = gen_wrap_scene(spec);
    const auto r = evaluate_scan("wrong_slice", pred, gt);
    CHECK(r.vein.confusion == Confusion::TP);
    CHECK(r.artery.confusion == Confusion::TN);
    CHECK(r.scan == Confusion::TP);
}

TEST_CASE("sensitivity and specificity") {
    const auto s = sensitivity_specificity({15, 2, 12, 2});
    REQUIRE(s.sensitivity.value);
    REQUIRE(s.specificity.value);
    CHECK(*s.sensitivity.value == doctest::Approx(15.0 / 17.0));
    CHECK(*s.sensitivity.value == doctest::Approx(0.882).epsilon(1e-3));
    CHECK(*s.specificity.value == doctest::Approx(0.857).epsilon(1e-3));

    const auto undefined = sensitivity_specificity({0, 3, 4, 0});
    CHECK_FALSE(undefined.sensitivity.value);
    CHECK_FALSE(undefined.sensitivity.reason.empty());
    CHECK(*undefined.specificity.value == doctest::Approx(4.0 / 7.0));
}

TEST_CASE("r_squared") {
    const std::vector<double> y{0.0, 90.0, 180.0};
    CHECK(r_squared(y, y) == 1.0);
    CHECK(r_squared(y, std::vector<double>{90.0, 90.0, 90.0}) == 0.0);
    CHECK(r_squared(y, std::vector<double>{180.0, 90.0, 0.0}) == -3.0);
    CHECK_THROWS_AS(r_squared(std::vector<double>{5.0, 5.0}, std::vector<double>{1.0, 2.0}), EvaluationError);
}

TEST_CASE("dpcg buckets") {
    const std::vector<DegreePair> same{{0, 0}, {45, 45}, {200, 200}, {300, 300}, {300, 300}};
    const auto all = bucket_counts(same);
    CHECK(all[0] == BucketCell{1, 1});
    CHECK(all[1] == BucketCell{1, 1});
    CHECK(all[2] == BucketCell{1, 1});
    CHECK(all[3] == BucketCell{2, 2});

    const std::vector<DegreePair> miss{{120.0, 60.0}};
    CHECK(bucket_counts(miss)[2] == BucketCell{0, 1});

    const auto vein = table_two_vein_pairs();
    const auto table = dpcg_bucket_table(vein, {});
    CHECK(table.vein[0] == BucketCell{19, 19});
    CHECK(table.vein[1] == BucketCell{5, 5});
    CHECK(table.vein[2] == BucketCell{0, 7});
    CHECK(table.vein[3] == BucketCell{1, 1});
    CHECK(table.artery[0] == BucketCell{0, 0});
    CHECK(bucket_of(90.0) == DpcgBucket::UpTo90);
    CHECK(bucket_of(90.01) == DpcgBucket::UpTo270);
    CHECK(bucket_of(270.01) == DpcgBucket::Above270);
}

TEST_CASE("critical vessel evaluation") {
    // Artery wrapped inside the pancreas, vein wrapped outside it.
    PhantomSpec spec;
    spec.dims = {4, 64, 64};
    spec.z_end = 4;
    spec.span_deg = 120.0;
    spec.vessel = VesselKind::Vein;
    spec.center_row = 20;
    spec.center_col = 20;
    auto [pred, vt] = gen_wrap_scene(spec);
    spec.vessel = VesselKind::Artery;
    spec.center_row = 44;
    spec.center_col = 44;
    spec.pancreas = Blob{2.0, 44.0, 44.0, 10.0, 16.0, 16.0};
    auto [artery_scene, at] = gen_wrap_scene(spec);
    for (ChannelId id : {ChannelId::Artery, ChannelId::Tumor, ChannelId::Pancreas}) {
        auto src = artery_scene.channel(id);
        auto dst = pred.channel(id);
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] |= src[i];
    }
    const auto all = evaluate_scan("both", pred, pred);
    CHECK(all.artery.pred_presence);
    CHECK(all.vein.pred_presence);

    SUBCASE("GA-like contact inside the pancreas is filtered away") {
        MaskVolume gt_critical(pred.dims(), {ChannelId::Tumor, ChannelId::Artery, ChannelId::Vein}, pred.spacing());
        const auto out = critical_vessel_eval(pred, gt_critical);
        CHECK(out.artery.confusion == Confusion::TN);
        CHECK_FALSE(out.artery.pred_presence);
        CHECK(out.vein.pred_presence);
        CHECK(out.vein.confusion == Confusion::FP);
    }
    SUBCASE("free vessel unchanged by the filter") {
        MaskVolume gt_critical = pred;
        auto a = gt_critical.channel(ChannelId::Artery);
        std::fill(a.begin(), a.end(), 0);
        const auto out = critical_vessel_eval(pred, gt_critical);
        CHECK(out.vein.confusion == Confusion::TP);
        CHECK(out.vein.pred_max == doctest::Approx(all.vein.pred_max));
        CHECK(out.artery.confusion == Confusion::TN);
        CHECK(out.scan == Confusion::TP);
    }
}

TEST_CASE("aggregate") {
    const auto suite = gen_confusion_suite(99, 20);
    std::vector<ScanResult> results;
    ConfusionCounts artery, vein, scan;
    for (const auto& s : suite) {
        auto r = evaluate_scan(s.id, s.pred, s.gt);
        CHECK(r.artery.confusion == s.artery);
        CHECK(r.vein.confusion == s.vein);
        CHECK(r.scan == s.scan);
        r.fold = std::to_string(results.size() % 2);
        results.push_back(r);
        artery.add(s.artery);
        vein.add(s.vein);
        scan.add(s.scan);
    }
    std::reverse(results.begin(), results.end());
    const auto report = aggregate(results);
    CHECK(report.all.artery.counts == artery);
    CHECK(report.all.vein.counts == vein);
    CHECK(report.all.scan.counts == scan);
    CHECK(report.scans.front().id == "scene_00");
    CHECK(report.dice.at("tumor").per_fold_std.has_value());
    CHECK(report.all.artery.sensitivity.per_fold_mean.has_value());
    CHECK_FALSE(report.critical);

    SUBCASE("self evaluation") {
        std::vector<ScanResult> self;
        for (const auto& s : suite) self.push_back(evaluate_scan(s.id, s.gt, s.gt));
        const auto r = aggregate(self);
        for (const auto& [name, sum] : r.dice) CHECK(sum.mean == 1.0);
        for (const auto* c : {&r.all.artery.counts, &r.all.vein.counts, &r.all.scan.counts}) {
            CHECK(c->fp == 0);
            CHECK(c->fn == 0);
        }
    }
}
