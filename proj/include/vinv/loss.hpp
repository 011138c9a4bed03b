#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "vinv/volume.hpp"

namespace vinv {

class LossError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Probability clamp applied before every logarithm.
inline constexpr double kLogClamp = 1e-7;
/// Smoothing term of the soft Dice ratio.
inline constexpr double kDiceSmooth = 1e-5;

/// Dense (C, Z, H, W) tensor of doubles with a channel identity per C index.
class Tensor {
public:
    Tensor() = default;
    /// Channels default to the first `c` ChannelIds in enum order.
    Tensor(std::size_t c, std::size_t z, std::size_t h, std::size_t w, double fill = 0.0);
    Tensor(std::vector<ChannelId> channels, Dims spatial, std::vector<double> values);

    static Tensor from_volume(const ProbVolume& v);
    static Tensor from_volume(const MaskVolume& v);

    std::size_t channels() const { return ids_.size(); }
    const std::vector<ChannelId>& channel_ids() const { return ids_; }
    const Dims& spatial() const { return spatial_; }
    std::size_t size() const { return values_.size(); }
    std::size_t channel_size() const { return spatial_.voxels(); }

    std::size_t channel_index(ChannelId id) const;
    std::span<const double> channel(std::size_t c) const;
    std::span<double> channel(std::size_t c);

    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }
    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }

    bool same_shape(const Tensor& other) const;

private:
    std::vector<ChannelId> ids_;
    Dims spatial_;
    std::vector<double> values_;
};

/// beta mixes BCE against Dice; alpha_w mixes the main term against the
/// overlap term.
struct LossWeights {
    double beta = 0.5;
    double alpha_w = 0.8;
};

struct PseudoOverlap {
    std::vector<double> alpha;  // tumor * artery
    std::vector<double> nu;     // tumor * vein
};

double bce(std::span<const double> p, std::span<const double> q);
double bce(const Tensor& p, const Tensor& q);

double soft_dice_loss(const Tensor& p, const Tensor& q);

PseudoOverlap pseudo_overlap(std::span<const double> tumor, std::span<const double> artery,
                             std::span<const double> vein);
PseudoOverlap pseudo_overlap(const Tensor& t);

double overlap_loss(const Tensor& pred, const Tensor& gt);

double combined_loss(const Tensor& pred, const Tensor& gt, const LossWeights& w = {});

// Analytic gradients with respect to the prediction tensor.
Tensor bce_grad(const Tensor& p, const Tensor& q);
Tensor soft_dice_grad(const Tensor& p, const Tensor& q);
Tensor overlap_grad(const Tensor& pred, const Tensor& gt);
Tensor combined_grad(const Tensor& pred, const Tensor& gt, const LossWeights& w = {});

enum class LossKind { Bce, Dice, Overlap, Combined };

std::string_view to_string(LossKind k);

double evaluate_loss(LossKind kind, const Tensor& pred, const Tensor& gt,
                     const LossWeights& w = {});
Tensor loss_gradient(LossKind kind, const Tensor& pred, const Tensor& gt,
                     const LossWeights& w = {});

inline constexpr double kGradcheckStep = 1e-4;
inline constexpr double kGradcheckMargin = 1e-3;

/// Max over prediction entries of |g_analytic - g_fd| / max(1, |g_analytic|, |g_fd|)
/// using central differences. Throws LossError when an entry is closer than
/// kGradcheckMargin to the clamp boundaries. A non-zero `max_entries` probes
/// an evenly strided subset of at most that many entries.
double gradcheck(LossKind kind, const Tensor& point, const Tensor& gt,
                 const LossWeights& w = {}, double step = kGradcheckStep,
                 std::size_t max_entries = 0);

/// Distance from 0 and 1 at which central differences of the log terms stay
/// accurate to well below 1e-4 relative error.
inline constexpr double kGradcheckInterior = 0.01;

/// Copy of `p` with every entry clamped into
/// [kGradcheckInterior, 1 - kGradcheckInterior].
Tensor gradcheck_interior(const Tensor& p);

}  // namespace vinv
