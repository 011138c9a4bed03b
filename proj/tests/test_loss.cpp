#include <doctest.h>

#include <cmath>
#include <random>

#include "vinv/loss.hpp"

using namespace vinv;

namespace {

Tensor random_tensor(std::size_t c, std::size_t z, std::size_t h, std::size_t w, std::mt19937& rng,
                     double lo = 0.05, double hi = 0.95) {
    Tensor t(c, z, h, w);
    std::uniform_real_distribution<double> u(lo, hi);
    for (double& v : t.values()) v = u(rng);
    return t;
}

Tensor random_binary(std::size_t c, std::size_t z, std::size_t h, std::size_t w, std::mt19937& rng) {
    Tensor t(c, z, h, w);
    std::bernoulli_distribution bit(0.4);
    for (double& v : t.values()) v = bit(rng) ? 1.0 : 0.0;
    return t;
}

// Central differences computed here, independently of gradcheck.
double fd_error(LossKind kind, const Tensor& p, const Tensor& q) {
    const Tensor g = loss_gradient(kind, p, q);
    Tensor probe = p;
    double worst = 0.0;
    const double h = 1e-5;
    for (std::size_t i = 0; i < p.size(); ++i) {
        probe[i] = p[i] + h;
        const double up = evaluate_loss(kind, probe, q);
        probe[i] = p[i] - h;
        const double down = evaluate_loss(kind, probe, q);
        probe[i] = p[i];
        const double fd = (up - down) / (2 * h);
        worst = std::max(worst, std::abs(fd - g[i]) / std::max({1.0, std::abs(fd), std::abs(g[i])}));
    }
    return worst;
}

}  // namespace

TEST_CASE("bce") {
    std::mt19937 rng(1);
    const Tensor q = random_binary(6, 1, 3, 3, rng);
    CHECK(bce(q, q) <= 1e-5);

    Tensor half(6, 1, 3, 3, 0.5);
    CHECK(bce(half, q) == doctest::Approx(std::log(2.0)).epsilon(1e-12));

    const std::vector<double> p{0.9}, t{1.0};
    CHECK(bce(p, t) == doctest::Approx(0.105360515657826).epsilon(1e-12));

    CHECK_THROWS_AS(bce(Tensor(6, 1, 2, 2), Tensor(6, 1, 2, 3)), LossError);
}

TEST_CASE("soft dice") {
    Tensor p(1, 1, 2, 2), q(1, 1, 2, 2);
    CHECK(soft_dice_loss(p, q) == doctest::Approx(0.0));
    p[0] = q[0] = 1.0;
    p[1] = q[1] = 1.0;
    CHECK(soft_dice_loss(p, q) == doctest::Approx(0.0).epsilon(1e-6));
    Tensor r(1, 1, 2, 2);
    r[2] = r[3] = 1.0;
    CHECK(soft_dice_loss(p, r) == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("pseudo overlap") {
    const std::vector<double> t{1.0, 0.8, 0.0}, a{1.0, 0.5, 1.0}, v{0.0, 0.25, 1.0};
    const auto o = pseudo_overlap(t, a, v);
    CHECK(o.alpha[0] == 1.0);
    CHECK(o.alpha[1] == doctest::Approx(0.4));
    CHECK(o.alpha[2] == 0.0);
    CHECK(o.nu[1] == doctest::Approx(0.2));
    CHECK(o.nu[2] == 0.0);
}

TEST_CASE("overlap loss") {
    std::mt19937 rng(2);
    const Tensor gt = random_binary(6, 2, 2, 2, rng);
    CHECK(overlap_loss(gt, gt) <= 2e-5);

    // Prediction 0.5 everywhere: pseudo overlaps are 0.25 against the GT products.
    const Tensor half(6, 2, 2, 2, 0.5);
    const auto ref = pseudo_overlap(gt);
    double expected = 0.0;
    for (const auto* target : {&ref.alpha, &ref.nu}) {
        double sum = 0.0;
        for (double y : *target) sum -= y * std::log(0.25) + (1 - y) * std::log(0.75);
        expected += sum / static_cast<double>(target->size());
    }
    CHECK(overlap_loss(half, gt) == doctest::Approx(expected).epsilon(1e-12));

    // No overlap in the GT, confident disjoint prediction.
    Tensor g(6, 1, 1, 2), p(6, 1, 1, 2);
    const auto T = g.channel_index(ChannelId::Tumor), A = g.channel_index(ChannelId::Artery);
    g.channel(T)[0] = 1.0;
    g.channel(A)[1] = 1.0;
    p = g;
    CHECK(overlap_loss(p, g) <= 1e-6);
}

TEST_CASE("combined loss") {
    std::mt19937 rng(3);
    const Tensor gt = random_binary(6, 2, 4, 4, rng);
    CHECK(combined_loss(gt, gt) <= 1e-4);

    const Tensor p = random_tensor(6, 2, 4, 4, rng);
    LossWeights only_main{0.3, 1.0};
    CHECK(combined_loss(p, gt, only_main) == 0.3 * bce(p, gt) + 0.7 * soft_dice_loss(p, gt));

    const double manual = 0.8 * (0.5 * bce(p, gt) + 0.5 * soft_dice_loss(p, gt)) + 0.2 * overlap_loss(p, gt);
    CHECK(std::abs(combined_loss(p, gt) - manual) <= 1e-12);

    CHECK_THROWS_AS(combined_loss(p, gt, {1.5, 0.8}), LossError);
}

TEST_CASE("analytic gradients match finite differences") {
    std::mt19937 rng(4);
    const Tensor p = random_tensor(6, 4, 4, 4, rng);
    const Tensor q = random_binary(6, 4, 4, 4, rng);
    for (auto kind : {LossKind::Bce, LossKind::Dice, LossKind::Overlap, LossKind::Combined}) {
        CAPTURE(to_string(kind));
        CHECK(fd_error(kind, p, q) < 1e-4);
        CHECK(gradcheck(kind, p, q) < 1e-4);
    }
}

TEST_CASE("gradcheck guards the clamp boundary") {
    Tensor p(6, 1, 1, 1, 0.5), q(6, 1, 1, 1, 1.0);
    p[0] = 1e-6;
    CHECK_THROWS_AS(gradcheck(LossKind::Bce, p, q), LossError);
    CHECK(gradcheck(LossKind::Bce, gradcheck_interior(p), q) < 1e-4);
}

TEST_CASE("missing overlap channels") {
    Tensor p(3, 1, 1, 1, 0.5);
    CHECK_THROWS_AS(overlap_loss(p, p), LossError);
}
