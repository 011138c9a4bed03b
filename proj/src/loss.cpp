#include "vinv/loss.hpp"

#include <algorithm>
#include <cmath>

namespace vinv {

Tensor::Tensor(std::size_t c, std::size_t z, std::size_t h, std::size_t w, double fill)
    : spatial_{z, h, w}, values_(c * z * h * w, fill) {
    if (c > 8) throw LossError("at most 8 channels have identities");
    for (std::size_t i = 0; i < c; ++i) ids_.push_back(static_cast<ChannelId>(i));
}

Tensor::Tensor(std::vector<ChannelId> channels, Dims spatial, std::vector<double> values)
    : ids_(std::move(channels)), spatial_(spatial), values_(std::move(values)) {
    if (values_.size() != ids_.size() * spatial_.voxels())
        throw LossError("tensor size does not match its shape");
}

Tensor Tensor::from_volume(const ProbVolume& v) {
    return Tensor(v.channels(), v.dims(), std::vector<double>(v.data().begin(), v.data().end()));
}

Tensor Tensor::from_volume(const MaskVolume& v) {
    return Tensor(v.channels(), v.dims(), std::vector<double>(v.data().begin(), v.data().end()));
}

std::size_t Tensor::channel_index(ChannelId id) const {
    auto it = std::find(ids_.begin(), ids_.end(), id);
    if (it == ids_.end()) throw LossError("missing channel: " + std::string(channel_name(id)));
    return static_cast<std::size_t>(it - ids_.begin());
}

std::span<const double> Tensor::channel(std::size_t c) const {
    return std::span<const double>(values_).subspan(c * channel_size(), channel_size());
}

std::span<double> Tensor::channel(std::size_t c) {
    return std::span<double>(values_).subspan(c * channel_size(), channel_size());
}

bool Tensor::same_shape(const Tensor& other) const {
    return ids_.size() == other.ids_.size() && spatial_ == other.spatial_;
}

std::string_view to_string(LossKind k) {
    switch (k) {
        case LossKind::Bce: return "bce";
        case LossKind::Dice: return "dice";
        case LossKind::Overlap: return "overlap";
        case LossKind::Combined: return "combined";
    }
    return "unknown";
}

namespace {

double clamp_p(double p) { return std::clamp(p, kLogClamp, 1.0 - kLogClamp); }

void require_shape(const Tensor& p, const Tensor& q) {
    if (!p.same_shape(q)) throw LossError("prediction and target dims mismatch");
}

void require_weights(const LossWeights& w) {
    if (!(w.beta >= 0.0 && w.beta <= 1.0 && w.alpha_w >= 0.0 && w.alpha_w <= 1.0))
        throw LossError("loss weights must lie in [0,1]");
}

// d/dp of the per-element BCE term, zero where the clamp is active.
double bce_element_grad(double p, double q) {
    if (p < kLogClamp || p > 1.0 - kLogClamp) return 0.0;
    return -q / p + (1.0 - q) / (1.0 - p);
}

struct OverlapChannels {
    std::size_t tumor, artery, vein;
};

OverlapChannels overlap_channels(const Tensor& t) {
    return {t.channel_index(ChannelId::Tumor), t.channel_index(ChannelId::Artery),
            t.channel_index(ChannelId::Vein)};
}

}  // namespace

double bce(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw LossError("prediction and target dims mismatch");
    if (p.empty()) return 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double pc = clamp_p(p[i]);
        sum -= q[i] * std::log(pc) + (1.0 - q[i]) * std::log(1.0 - pc);
    }
    return sum / static_cast<double>(p.size());
}

double bce(const Tensor& p, const Tensor& q) {
    require_shape(p, q);
    return bce(std::span<const double>(p.values()), std::span<const double>(q.values()));
}

double soft_dice_loss(const Tensor& p, const Tensor& q) {
    require_shape(p, q);
    if (p.channels() == 0) return 0.0;
    double total = 0.0;
    for (std::size_t c = 0; c < p.channels(); ++c) {
        const auto pc = p.channel(c), qc = q.channel(c);
        double inter = 0.0, sp = 0.0, sq = 0.0;
        for (std::size_t i = 0; i < pc.size(); ++i) {
            inter += pc[i] * qc[i];
            sp += pc[i];
            sq += qc[i];
        }
        total += 1.0 - (2.0 * inter + kDiceSmooth) / (sp + sq + kDiceSmooth);
    }
    return total / static_cast<double>(p.channels());
}

PseudoOverlap pseudo_overlap(std::span<const double> tumor, std::span<const double> artery,
                             std::span<const double> vein) {
    if (tumor.size() != artery.size() || tumor.size() != vein.size())
        throw LossError("pseudo_overlap: dims mismatch");
    PseudoOverlap out{std::vector<double>(tumor.size()), std::vector<double>(tumor.size())};
    for (std::size_t i = 0; i < tumor.size(); ++i) {
        out.alpha[i] = tumor[i] * artery[i];
        out.nu[i] = tumor[i] * vein[i];
    }
    return out;
}

PseudoOverlap pseudo_overlap(const Tensor& t) {
    const auto ch = overlap_channels(t);
    return pseudo_overlap(t.channel(ch.tumor), t.channel(ch.artery), t.channel(ch.vein));
}

double overlap_loss(const Tensor& pred, const Tensor& gt) {
    const auto hat = pseudo_overlap(pred);
    const auto ref = pseudo_overlap(gt);
    if (hat.alpha.size() != ref.alpha.size()) throw LossError("prediction and target dims mismatch");
    return bce(hat.alpha, ref.alpha) + bce(hat.nu, ref.nu);
}

double combined_loss(const Tensor& pred, const Tensor& gt, const LossWeights& w) {
    require_weights(w);
    require_shape(pred, gt);
    const double main = w.beta * bce(pred, gt) + (1.0 - w.beta) * soft_dice_loss(pred, gt);
    return w.alpha_w * main + (1.0 - w.alpha_w) * overlap_loss(pred, gt);
}

Tensor bce_grad(const Tensor& p, const Tensor& q) {
    require_shape(p, q);
    Tensor g = p;
    const double n = static_cast<double>(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) g[i] = bce_element_grad(p[i], q[i]) / n;
    return g;
}

Tensor soft_dice_grad(const Tensor& p, const Tensor& q) {
    require_shape(p, q);
    Tensor g = p;
    const double channels = static_cast<double>(p.channels());
    for (std::size_t c = 0; c < p.channels(); ++c) {
        const auto pc = p.channel(c), qc = q.channel(c);
        double inter = 0.0, sp = 0.0, sq = 0.0;
        for (std::size_t i = 0; i < pc.size(); ++i) {
            inter += pc[i] * qc[i];
            sp += pc[i];
            sq += qc[i];
        }
        const double num = 2.0 * inter + kDiceSmooth;
        const double den = sp + sq + kDiceSmooth;
        auto gc = g.channel(c);
        for (std::size_t i = 0; i < pc.size(); ++i)
            gc[i] = -(2.0 * qc[i] * den - num) / (den * den) / channels;
    }
    return g;
}

Tensor overlap_grad(const Tensor& pred, const Tensor& gt) {
    require_shape(pred, gt);
    const auto ch = overlap_channels(pred);
    const auto ref = pseudo_overlap(gt);
    Tensor g(pred.channel_ids(), pred.spatial(), std::vector<double>(pred.size(), 0.0));
    const auto t = pred.channel(ch.tumor), a = pred.channel(ch.artery), v = pred.channel(ch.vein);
    auto gt_t = g.channel(ch.tumor), gt_a = g.channel(ch.artery), gt_v = g.channel(ch.vein);
    const double n = static_cast<double>(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double d_alpha = bce_element_grad(t[i] * a[i], ref.alpha[i]) / n;
        const double d_nu = bce_element_grad(t[i] * v[i], ref.nu[i]) / n;
        gt_t[i] = d_alpha * a[i] + d_nu * v[i];
        gt_a[i] = d_alpha * t[i];
        gt_v[i] = d_nu * t[i];
    }
    return g;
}

Tensor combined_grad(const Tensor& pred, const Tensor& gt, const LossWeights& w) {
    require_weights(w);
    const Tensor gb = bce_grad(pred, gt);
    const Tensor gd = soft_dice_grad(pred, gt);
    const Tensor go = overlap_grad(pred, gt);
    Tensor g = gb;
    for (std::size_t i = 0; i < g.size(); ++i)
        g[i] = w.alpha_w * (w.beta * gb[i] + (1.0 - w.beta) * gd[i]) + (1.0 - w.alpha_w) * go[i];
    return g;
}

double evaluate_loss(LossKind kind, const Tensor& pred, const Tensor& gt, const LossWeights& w) {
    switch (kind) {
        case LossKind::Bce: return bce(pred, gt);
        case LossKind::Dice: return soft_dice_loss(pred, gt);
        case LossKind::Overlap: return overlap_loss(pred, gt);
        case LossKind::Combined: return combined_loss(pred, gt, w);
    }
    throw LossError("unknown loss kind");
}

Tensor loss_gradient(LossKind kind, const Tensor& pred, const Tensor& gt, const LossWeights& w) {
    switch (kind) {
        case LossKind::Bce: return bce_grad(pred, gt);
        case LossKind::Dice: return soft_dice_grad(pred, gt);
        case LossKind::Overlap: return overlap_grad(pred, gt);
        case LossKind::Combined: return combined_grad(pred, gt, w);
    }
    throw LossError("unknown loss kind");
}

Tensor gradcheck_interior(const Tensor& p) {
    Tensor out = p;
    for (double& v : out.values())
        v = std::clamp(v, kGradcheckInterior, 1.0 - kGradcheckInterior);
    return out;
}

double gradcheck(LossKind kind, const Tensor& point, const Tensor& gt, const LossWeights& w,
                 double step, std::size_t max_entries) {
    require_shape(point, gt);
    for (double v : point.values()) {
        if (!(v >= kLogClamp + kGradcheckMargin && v <= 1.0 - kLogClamp - kGradcheckMargin))
            throw LossError("gradcheck point too close to the clamp boundary");
    }
    const Tensor analytic = loss_gradient(kind, point, gt, w);
    Tensor probe = point;
    double worst = 0.0;
    const std::size_t stride =
        max_entries == 0 || max_entries >= point.size() ? 1 : (point.size() + max_entries - 1) / max_entries;
    for (std::size_t i = 0; i < point.size(); i += stride) {
        const double x = point[i];
        probe[i] = x + step;
        const double up = evaluate_loss(kind, probe, gt, w);
        probe[i] = x - step;
        const double down = evaluate_loss(kind, probe, gt, w);
        probe[i] = x;
        const double fd = (up - down) / (2.0 * step);
        const double ga = analytic[i];
        const double denom = std::max({1.0, std::abs(ga), std::abs(fd)});
        worst = std::max(worst, std::abs(ga - fd) / denom);
    }
    return worst;
}

}  // namespace vinv
