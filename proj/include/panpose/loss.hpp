#pragma once

#include "panpose/errors.hpp"
#include "panpose/heatmap.hpp"
#include "panpose/types.hpp"

#include <string>

namespace panpose {

template <typename Scalar>
struct LossBreakdown {
    Scalar total = 0;
    Vector<Scalar> per_channel;  // length m, sums to total
    int masked_channel_count = 0;
};

namespace detail {

template <typename Scalar>
void check_loss_shapes(const HeatmapStack<Scalar>& pred, const HeatmapStack<Scalar>& target) {
    if (!pred.same_shape(target)) {
        throw ParamError("prediction and target stacks have different shapes");
    }
    if (target.mask.size() != target.channel_count()) {
        throw ParamError("target mask length " + std::to_string(target.mask.size()) +
                         " does not match channel count " +
                         std::to_string(target.channel_count()));
    }
}

}  // namespace detail

// Summed squared error over all pixels and channels. With masking enabled,
// channel k contributes n_k * sum_ij (p_k - t_k)^2 where n_k is the target's
// keypoint mask; with masking disabled every channel contributes, so absent
// channels get penalized toward their all-zero targets. A plain sum, not a
// mean: any averaging constant only rescales the learning rate.
template <typename Scalar>
LossBreakdown<Scalar> masked_mse(const HeatmapStack<Scalar>& pred,
                                 const HeatmapStack<Scalar>& target, bool masking_enabled) {
    detail::check_loss_shapes(pred, target);
    const std::size_t m = target.channel_count();
    LossBreakdown<Scalar> out;
    out.per_channel = Vector<Scalar>::Zero(m);
    for (std::size_t k = 0; k < m; ++k) {
        if (target.mask[k] == 0) ++out.masked_channel_count;
        if (masking_enabled && target.mask[k] == 0) continue;
        out.per_channel[k] = (pred.channels[k] - target.channels[k]).square().sum();
    }
    out.total = out.per_channel.sum();
    return out;
}

// dL/dp_k(i,j) = 2 * n_k * (p_k(i,j) - t_k(i,j)); masked channels are exactly
// zero. The returned stack carries the target's mask.
template <typename Scalar>
HeatmapStack<Scalar> masked_mse_grad(const HeatmapStack<Scalar>& pred,
                                     const HeatmapStack<Scalar>& target, bool masking_enabled) {
    detail::check_loss_shapes(pred, target);
    auto grad = HeatmapStack<Scalar>::zeros(target.channel_count(), target.rows(), target.cols(),
                                            target.stride);
    grad.mask = target.mask;
    for (std::size_t k = 0; k < target.channel_count(); ++k) {
        if (masking_enabled && target.mask[k] == 0) continue;
        grad.channels[k] = Scalar(2) * (pred.channels[k] - target.channels[k]);
    }
    return grad;
}

}  // namespace panpose
