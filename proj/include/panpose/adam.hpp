#pragma once

#include "panpose/errors.hpp"
#include "panpose/types.hpp"

#include <cmath>

namespace panpose {

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

template <typename Scalar>
struct AdamState {
    Matrix<Scalar> m;  // first-moment estimate, same shape as the parameters
    Matrix<Scalar> v;  // second-moment estimate
    long step = 0;

    static AdamState zeros_like(const Matrix<Scalar>& params) {
        return {Matrix<Scalar>::Zero(params.rows(), params.cols()),
                Matrix<Scalar>::Zero(params.rows(), params.cols()), 0};
    }
};

// One Adam update with bias correction, in place. Deterministic given the
// state. A non-finite gradient aborts the step without touching params or
// state.
template <typename Scalar>
void adam_step(Matrix<Scalar>& params, const Matrix<Scalar>& grads, AdamState<Scalar>& state,
               const AdamConfig& config) {
    if (params.rows() != grads.rows() || params.cols() != grads.cols() ||
        params.rows() != state.m.rows() || params.cols() != state.m.cols()) {
        throw ParamError("adam_step: parameter, gradient and state shapes disagree");
    }
    if (!grads.allFinite()) {
        throw ParamError("adam_step: non-finite gradient, step aborted");
    }
    const Scalar b1 = static_cast<Scalar>(config.beta1);
    const Scalar b2 = static_cast<Scalar>(config.beta2);
    state.step += 1;
    state.m = b1 * state.m + (Scalar(1) - b1) * grads;
    state.v = b2 * state.v + (Scalar(1) - b2) * grads.cwiseProduct(grads);
    const Scalar corr1 = Scalar(1) - std::pow(b1, static_cast<Scalar>(state.step));
    const Scalar corr2 = Scalar(1) - std::pow(b2, static_cast<Scalar>(state.step));
    const Scalar lr = static_cast<Scalar>(config.learning_rate);
    const Scalar eps = static_cast<Scalar>(config.epsilon);
    params.array() -= lr * (state.m.array() / corr1) /
                      ((state.v.array() / corr2).sqrt() + eps);
}

}  // namespace panpose
