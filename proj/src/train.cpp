#include "panpose/train.hpp"

#include <iomanip>
#include <sstream>

namespace panpose {

TrainConfig train_preset(const std::string& name) {
    TrainConfig cfg;
    if (name == "toy") {
        cfg.learning_rate = 1e-2;
        cfg.epochs = 200;
        cfg.batch_size = 8;
        return cfg;
    }
    if (name == "toy-demo") {
        cfg.learning_rate = 2e-2;
        cfg.epochs = 40;
        cfg.batch_size = 16;
        return cfg;
    }
    if (name == "pseudo-label") {
        cfg.learning_rate = 1e-4;
        cfg.epochs = 5;
        cfg.batch_size = 8;
        return cfg;
    }
    if (name == "topdown") {
        cfg.learning_rate = 5e-4;
        cfg.epochs = 210;
        cfg.lr_decay_epochs = {170, 200};
        cfg.lr_decay_factor = 0.1;
        cfg.batch_size = 64;
        cfg.warmup_iters = 500;
        cfg.warmup_ratio = 0.01;
        return cfg;
    }
    if (name == "bottomup-quadruped-pretrain") {
        cfg.learning_rate = 1.5e-3;
        cfg.epochs = 100;
        cfg.lr_decay_epochs = {50, 70};
        cfg.lr_decay_factor = 0.1;
        cfg.batch_size = 64;
        return cfg;
    }
    if (name == "bottomup-labmice-pretrain") {
        cfg.learning_rate = 1.5e-3;
        cfg.epochs = 200;
        cfg.lr_decay_epochs = {100, 160};
        cfg.lr_decay_factor = 0.1;
        cfg.batch_size = 64;
        return cfg;
    }
    if (name == "bottomup-finetune") {
        cfg.learning_rate = 1.5e-3;
        cfg.epochs = 210;
        cfg.lr_decay_epochs = {160, 200};
        cfg.lr_decay_factor = 0.1;
        cfg.batch_size = 64;
        return cfg;
    }
    std::ostringstream msg;
    msg << "unknown training preset '" << name << "'; available:";
    for (const auto& n : train_preset_names()) msg << " " << n;
    throw ParamError(msg.str());
}

std::vector<std::string> train_preset_names() {
    return {"toy", "toy-demo", "pseudo-label", "topdown", "bottomup-quadruped-pretrain",
            "bottomup-labmice-pretrain", "bottomup-finetune"};
}

std::string history_to_csv(const std::vector<EpochStats>& history) {
    std::ostringstream out;
    out << "epoch,total_loss,lr\n";
    out << std::setprecision(17);
    for (const auto& row : history) {
        out << row.epoch << "," << row.total_loss << "," << row.lr << "\n";
    }
    return out.str();
}

}  // namespace panpose
