#pragma once

#include "panpose/adam.hpp"
#include "panpose/errors.hpp"
#include "panpose/loss.hpp"
#include "panpose/predictor.hpp"
#include "panpose/rng.hpp"
#include "panpose/types.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

namespace panpose {

struct TrainConfig {
    double learning_rate = 1e-2;
    int epochs = 200;
    std::vector<int> lr_decay_epochs;  // 0-based epoch indices, strictly increasing
    double lr_decay_factor = 0.1;
    int batch_size = 8;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;
    bool masking_enabled = true;
    std::uint64_t seed = 0;
    // Linear learning-rate ramp from warmup_ratio * lr to lr over the first
    // warmup_iters minibatch iterations. 0 disables warmup.
    int warmup_iters = 0;
    double warmup_ratio = 0.01;

    void check() const;
};

// Named hyperparameter presets. "topdown" and the "bottomup-*" presets store
// the full-scale schedules for reference; desk-scale runs use "toy".
// "pseudo-label" is the short fine-tuning schedule (5 epochs at lr 1e-4).
TrainConfig train_preset(const std::string& name);
std::vector<std::string> train_preset_names();

struct TrainSample {
    Planes<double> features;        // f planes, h x w
    HeatmapStack<double> target;    // m channels + mask
};

struct EpochStats {
    int epoch = 0;
    double total_loss = 0.0;  // summed over the epoch's samples
    double lr = 0.0;          // rate in effect at the epoch's final iteration
};

struct TrainResult {
    ToyPredictor<double> predictor;
    std::vector<EpochStats> history;
};

// "epoch,total_loss,lr" with one row per epoch.
std::string history_to_csv(const std::vector<EpochStats>& history);

inline void TrainConfig::check() const {
    if (!(learning_rate > 0.0)) throw ParamError("learning_rate must be positive");
    if (epochs < 0) throw ParamError("epochs must be >= 0");
    if (!(adam_beta1 > 0.0 && adam_beta1 < 1.0 && adam_beta2 > 0.0 && adam_beta2 < 1.0)) {
        throw ParamError("adam betas must lie in (0, 1)");
    }
    if (batch_size < 1) throw ParamError("batch_size must be >= 1");
    for (std::size_t i = 0; i < lr_decay_epochs.size(); ++i) {
        if (lr_decay_epochs[i] < 0 || lr_decay_epochs[i] >= epochs) {
            throw ParamError("lr_decay_epochs entries must lie in [0, epochs)");
        }
        if (i > 0 && lr_decay_epochs[i] <= lr_decay_epochs[i - 1]) {
            throw ParamError("lr_decay_epochs must be strictly increasing");
        }
    }
}

// Minibatch Adam on the masked summed-square loss. Sample order is a seeded
// shuffle per epoch, gradients accumulate over a batch in sample order, and
// everything is single-threaded, so a fixed seed reproduces the loss history
// bit for bit. epochs == 0 returns the predictor unchanged.
inline TrainResult train(const ToyPredictor<double>& predictor,
                         const std::vector<TrainSample>& dataset, const TrainConfig& config) {
    config.check();
    if (dataset.empty()) throw ParamError("training dataset is empty");
    const std::size_t m = predictor.channel_count();
    const std::size_t f = predictor.feature_count();
    for (const auto& sample : dataset) {
        if (sample.target.channel_count() != m) {
            throw ParamError("target channel count does not match the predictor");
        }
        if (sample.features.size() != f) {
            throw ParamError("feature plane count does not match the predictor");
        }
    }

    TrainResult result{predictor, {}};
    result.history.reserve(config.epochs);
    auto state = AdamState<double>::zeros_like(result.predictor.theta);
    SplitMix64 rng(config.seed);

    double base_lr = config.learning_rate;
    long iteration = 0;
    std::vector<std::size_t> order(dataset.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        if (std::find(config.lr_decay_epochs.begin(), config.lr_decay_epochs.end(), epoch) !=
            config.lr_decay_epochs.end()) {
            base_lr *= config.lr_decay_factor;
        }
        rng.shuffle(order);

        double epoch_loss = 0.0;
        double epoch_lr = base_lr;
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            ++iteration;
            double lr = base_lr;
            if (config.warmup_iters > 0 && iteration <= config.warmup_iters) {
                const double t = static_cast<double>(iteration) /
                                 static_cast<double>(config.warmup_iters);
                lr = base_lr * (config.warmup_ratio + (1.0 - config.warmup_ratio) * t);
            }
            epoch_lr = lr;

            Matrix<double> grad = Matrix<double>::Zero(result.predictor.theta.rows(),
                                                       result.predictor.theta.cols());
            const std::size_t end = std::min(order.size(), start + config.batch_size);
            for (std::size_t i = start; i < end; ++i) {
                const TrainSample& sample = dataset[order[i]];
                const auto pred = predict(result.predictor, sample.features,
                                          sample.target.stride);
                epoch_loss += masked_mse(pred, sample.target, config.masking_enabled).total;
                const auto out_grad = masked_mse_grad(pred, sample.target,
                                                      config.masking_enabled);
                grad += parameter_gradient(out_grad, sample.features);
            }

            AdamConfig adam{lr, config.adam_beta1, config.adam_beta2, config.adam_epsilon};
            adam_step(result.predictor.theta, grad, state, adam);
        }
        result.history.push_back({epoch, epoch_loss, epoch_lr});
    }
    return result;
}

// Short self-training pass on a pseudo-labeled dataset: identical mechanics
// to train with the pseudo-label preset (lr 1e-4, 5 epochs) unless the caller
// overrides it.
inline TrainResult finetune_pseudo(const ToyPredictor<double>& predictor,
                                   const std::vector<TrainSample>& pseudo_dataset,
                                   const TrainConfig& config_override = train_preset(
                                       "pseudo-label")) {
    return train(predictor, pseudo_dataset, config_override);
}

}  // namespace panpose
