#pragma once

#include "panpose/eval.hpp"
#include "panpose/merge.hpp"
#include "panpose/train.hpp"

#include <map>
#include <string>
#include <variant>
#include <vector>

namespace panpose {

// Flat key/value config. Covers the TOML subset the tools need:
// `key = value` lines with numbers, booleans, quoted strings and arrays of
// numbers, plus [section] headers (keys become "section.key") and #-comments.
// JSON documents parse into the same structure, so either extension works.
struct ConfigValue {
    std::variant<double, bool, std::string, std::vector<double>> value;

    double as_number() const;
    bool as_bool() const;
    const std::string& as_string() const;
    const std::vector<double>& as_array() const;
};

class Config {
public:
    static Config parse_toml(const std::string& bytes);
    static Config parse_json(const std::string& bytes);
    // Dispatches on extension: .json -> JSON, anything else -> TOML subset.
    static Config load(const std::string& path);

    bool has(const std::string& key) const { return values_.count(key) > 0; }
    const ConfigValue& at(const std::string& key) const;

    double number_or(const std::string& key, double fallback) const;
    bool bool_or(const std::string& key, bool fallback) const;
    std::string string_or(const std::string& key, const std::string& fallback) const;

    const std::map<std::string, ConfigValue>& values() const { return values_; }

private:
    std::map<std::string, ConfigValue> values_;
};

// TrainConfig from a config file; unknown keys are rejected so typos surface.
// Recognized keys: preset, learning_rate, epochs, lr_decay_epochs,
// lr_decay_factor, batch_size, adam_beta1, adam_beta2, adam_epsilon,
// masking_enabled, seed, warmup_iters, warmup_ratio. A preset, when present,
// provides the baseline the other keys override.
TrainConfig train_config_from(const Config& config);

// SigmaConfig from a config file: either `sigma = 0.1` broadcast over m
// channels, `sigmas = [..]` (length must equal m), or `coco_mean = true`.
SigmaConfig sigma_config_from(const Config& config, std::size_t m);

std::string merge_report_to_json(const MergeReport& report);

}  // namespace panpose
