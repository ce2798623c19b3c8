#pragma once

#include "panpose/errors.hpp"
#include "panpose/heatmap.hpp"
#include "panpose/types.hpp"

#include <string>
#include <vector>

namespace panpose {

// Per-channel linear map from f shared input feature planes to one output
// plane: p_k(i,j) = theta(k, f) + sum_c theta(k, c) * feat_c(i,j). Exactly
// linear, so analytic gradients are checkable to machine precision. theta has
// shape m x (f+1); column f holds the per-channel bias.
template <typename Scalar>
struct ToyPredictor {
    Matrix<Scalar> theta;

    std::size_t channel_count() const { return static_cast<std::size_t>(theta.rows()); }
    std::size_t feature_count() const {
        return theta.cols() > 0 ? static_cast<std::size_t>(theta.cols() - 1) : 0;
    }

    static ToyPredictor zeros(std::size_t m, std::size_t f) {
        return {Matrix<Scalar>::Zero(m, f + 1)};
    }
};

namespace detail {

// Feature planes flattened to an (f+1) x (h*w) matrix with a trailing
// all-ones row for the bias.
template <typename Scalar>
Matrix<Scalar> design_matrix(const Planes<Scalar>& features) {
    if (features.empty()) throw ParamError("at least one feature plane is required");
    const Eigen::Index h = features.front().rows();
    const Eigen::Index w = features.front().cols();
    Matrix<Scalar> design(features.size() + 1, h * w);
    for (std::size_t c = 0; c < features.size(); ++c) {
        if (features[c].rows() != h || features[c].cols() != w) {
            throw ParamError("feature planes have inconsistent shapes");
        }
        design.row(static_cast<Eigen::Index>(c)) =
            Eigen::Map<const Vector<Scalar>>(features[c].data(), h * w).transpose();
    }
    design.row(design.rows() - 1).setOnes();
    return design;
}

}  // namespace detail

template <typename Scalar>
HeatmapStack<Scalar> predict(const ToyPredictor<Scalar>& predictor,
                             const Planes<Scalar>& features, int stride = 4) {
    if (predictor.feature_count() != features.size()) {
        throw ParamError("predictor expects " + std::to_string(predictor.feature_count()) +
                         " feature planes, got " + std::to_string(features.size()));
    }
    const Eigen::Index h = features.front().rows();
    const Eigen::Index w = features.front().cols();
    const Matrix<Scalar> design = detail::design_matrix(features);
    // (h*w) x m, so each channel is one contiguous column
    const Matrix<Scalar> flat = (predictor.theta * design).transpose();

    auto stack = HeatmapStack<Scalar>::zeros(predictor.channel_count(), h, w, stride);
    stack.mask.assign(predictor.channel_count(), 1);
    for (std::size_t k = 0; k < predictor.channel_count(); ++k) {
        stack.channels[k] = Eigen::Map<const Plane<Scalar>>(
            flat.col(static_cast<Eigen::Index>(k)).data(), h, w);
    }
    return stack;
}

// Chain rule through the linear map: dL/dtheta = dL/dP * design^T, where
// dL/dP is the heatmap-space gradient. Rows feeding only masked channels come
// out exactly zero.
template <typename Scalar>
Matrix<Scalar> parameter_gradient(const HeatmapStack<Scalar>& output_grad,
                                  const Planes<Scalar>& features) {
    const Matrix<Scalar> design = detail::design_matrix(features);
    Matrix<Scalar> grad(output_grad.channel_count(), design.rows());
    for (std::size_t k = 0; k < output_grad.channel_count(); ++k) {
        const auto flat = Eigen::Map<const Vector<Scalar>>(output_grad.channels[k].data(),
                                                           output_grad.channels[k].size());
        grad.row(static_cast<Eigen::Index>(k)) = (design * flat).transpose();
    }
    return grad;
}

// Parameters reuse the heatmap binary layout: header (m, 1, f+1, 1), m mask
// bytes (all ones), then the m x (f+1) float32 theta block.
template <typename Scalar>
std::string serialize_predictor(const ToyPredictor<Scalar>& predictor) {
    auto stack = HeatmapStack<Scalar>::zeros(predictor.channel_count(), 1,
                                             predictor.theta.cols(), 1);
    stack.mask.assign(predictor.channel_count(), 1);
    for (std::size_t k = 0; k < predictor.channel_count(); ++k) {
        stack.channels[k].row(0) = predictor.theta.row(static_cast<Eigen::Index>(k)).array();
    }
    return serialize_stack(stack);
}

template <typename Scalar>
ToyPredictor<Scalar> parse_predictor(const std::string& bytes) {
    const auto stack = parse_stack<Scalar>(bytes);
    if (stack.rows() != 1 || stack.cols() < 1) {
        throw ParseError("predictor blob does not hold 1 x (f+1) parameter rows");
    }
    ToyPredictor<Scalar> predictor;
    predictor.theta.resize(stack.channel_count(), stack.cols());
    for (std::size_t k = 0; k < stack.channel_count(); ++k) {
        predictor.theta.row(static_cast<Eigen::Index>(k)) = stack.channels[k].row(0).matrix();
    }
    return predictor;
}

}  // namespace panpose
