#include "panpose/config.hpp"

#include "panpose/coco_json.hpp"
#include "panpose/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <functional>
#include <set>
#include <sstream>

namespace panpose {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// Strips an unquoted # comment.
std::string strip_comment(const std::string& line) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_string = !in_string;
        if (line[i] == '#' && !in_string) return line.substr(0, i);
    }
    return line;
}

bool parse_number(const std::string& text, double& out) {
    std::size_t pos = 0;
    try {
        out = std::stod(text, &pos);
    } catch (...) {
        return false;
    }
    return pos == text.size();
}

ConfigValue parse_scalar(const std::string& raw, std::size_t line_no) {
    const std::string text = trim(raw);
    if (text.empty()) throw ParseError("config line " + std::to_string(line_no) + ": empty value");
    if (text == "true") return {true};
    if (text == "false") return {false};
    if (text.front() == '"') {
        if (text.size() < 2 || text.back() != '"') {
            throw ParseError("config line " + std::to_string(line_no) + ": unterminated string");
        }
        return {text.substr(1, text.size() - 2)};
    }
    if (text.front() == '[') {
        if (text.back() != ']') {
            throw ParseError("config line " + std::to_string(line_no) +
                             ": arrays must close on the same line");
        }
        std::vector<double> values;
        std::string inner = text.substr(1, text.size() - 2);
        std::istringstream ss(inner);
        std::string item;
        while (std::getline(ss, item, ',')) {
            const std::string it = trim(item);
            if (it.empty()) continue;
            double num = 0.0;
            if (!parse_number(it, num)) {
                throw ParseError("config line " + std::to_string(line_no) +
                                 ": array element '" + it + "' is not a number");
            }
            values.push_back(num);
        }
        return {values};
    }
    double num = 0.0;
    if (parse_number(text, num)) return {num};
    throw ParseError("config line " + std::to_string(line_no) + ": cannot parse value '" + text +
                     "' (strings need double quotes)");
}

}  // namespace

double ConfigValue::as_number() const {
    if (const double* v = std::get_if<double>(&value)) return *v;
    throw ParamError("config value is not a number");
}

bool ConfigValue::as_bool() const {
    if (const bool* v = std::get_if<bool>(&value)) return *v;
    throw ParamError("config value is not a boolean");
}

const std::string& ConfigValue::as_string() const {
    if (const std::string* v = std::get_if<std::string>(&value)) return *v;
    throw ParamError("config value is not a string");
}

const std::vector<double>& ConfigValue::as_array() const {
    if (const auto* v = std::get_if<std::vector<double>>(&value)) return *v;
    throw ParamError("config value is not an array");
}

Config Config::parse_toml(const std::string& bytes) {
    Config config;
    std::istringstream ss(bytes);
    std::string line;
    std::string section;
    std::size_t line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        const std::string t = trim(strip_comment(line));
        if (t.empty()) continue;
        if (t.front() == '[') {
            if (t.back() != ']') {
                throw ParseError("config line " + std::to_string(line_no) + ": bad section header");
            }
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos) {
            throw ParseError("config line " + std::to_string(line_no) + ": expected key = value");
        }
        std::string key = trim(t.substr(0, eq));
        if (key.empty()) {
            throw ParseError("config line " + std::to_string(line_no) + ": empty key");
        }
        if (!section.empty()) key = section + "." + key;
        config.values_[key] = parse_scalar(t.substr(eq + 1), line_no);
    }
    return config;
}

Config Config::parse_json(const std::string& bytes) {
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(bytes);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("malformed JSON config: ") + e.what(), e.byte);
    }
    if (!root.is_object()) throw ParseError("JSON config must be an object");

    Config config;
    std::function<void(const nlohmann::json&, const std::string&)> flatten =
        [&config, &flatten](const nlohmann::json& obj, const std::string& prefix) {
            for (const auto& [key, val] : obj.items()) {
                const std::string full = prefix.empty() ? key : prefix + "." + key;
                if (val.is_object()) {
                    flatten(val, full);
                } else if (val.is_boolean()) {
                    config.values_[full] = {val.get<bool>()};
                } else if (val.is_number()) {
                    config.values_[full] = {val.get<double>()};
                } else if (val.is_string()) {
                    config.values_[full] = {val.get<std::string>()};
                } else if (val.is_array()) {
                    std::vector<double> nums;
                    for (const auto& item : val) {
                        if (!item.is_number()) {
                            throw ParseError("JSON config array '" + full + "' must hold numbers");
                        }
                        nums.push_back(item.get<double>());
                    }
                    config.values_[full] = {nums};
                } else {
                    throw ParseError("JSON config key '" + full + "' has an unsupported type");
                }
            }
        };
    flatten(root, "");
    return config;
}

Config Config::load(const std::string& path) {
    const std::string bytes = read_file(path);
    const bool is_json = path.size() >= 5 && path.substr(path.size() - 5) == ".json";
    try {
        return is_json ? parse_json(bytes) : parse_toml(bytes);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

const ConfigValue& Config::at(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ParamError("config key '" + key + "' is missing");
    return it->second;
}

double Config::number_or(const std::string& key, double fallback) const {
    return has(key) ? at(key).as_number() : fallback;
}

bool Config::bool_or(const std::string& key, bool fallback) const {
    return has(key) ? at(key).as_bool() : fallback;
}

std::string Config::string_or(const std::string& key, const std::string& fallback) const {
    return has(key) ? at(key).as_string() : fallback;
}

TrainConfig train_config_from(const Config& config) {
    static const std::set<std::string> known = {
        "preset",      "learning_rate", "epochs",          "lr_decay_epochs",
        "lr_decay_factor", "batch_size", "adam_beta1",     "adam_beta2",
        "adam_epsilon",    "masking_enabled", "seed",      "warmup_iters",
        "warmup_ratio"};
    for (const auto& [key, value] : config.values()) {
        if (!known.count(key)) {
            throw ParamError("unknown training config key '" + key + "'");
        }
    }

    TrainConfig cfg = config.has("preset") ? train_preset(config.at("preset").as_string())
                                           : TrainConfig{};
    cfg.learning_rate = config.number_or("learning_rate", cfg.learning_rate);
    cfg.epochs = static_cast<int>(config.number_or("epochs", cfg.epochs));
    if (config.has("lr_decay_epochs")) {
        cfg.lr_decay_epochs.clear();
        for (double e : config.at("lr_decay_epochs").as_array()) {
            cfg.lr_decay_epochs.push_back(static_cast<int>(e));
        }
    }
    cfg.lr_decay_factor = config.number_or("lr_decay_factor", cfg.lr_decay_factor);
    cfg.batch_size = static_cast<int>(config.number_or("batch_size", cfg.batch_size));
    cfg.adam_beta1 = config.number_or("adam_beta1", cfg.adam_beta1);
    cfg.adam_beta2 = config.number_or("adam_beta2", cfg.adam_beta2);
    cfg.adam_epsilon = config.number_or("adam_epsilon", cfg.adam_epsilon);
    cfg.masking_enabled = config.bool_or("masking_enabled", cfg.masking_enabled);
    cfg.seed = static_cast<std::uint64_t>(config.number_or("seed", static_cast<double>(cfg.seed)));
    cfg.warmup_iters = static_cast<int>(config.number_or("warmup_iters", cfg.warmup_iters));
    cfg.warmup_ratio = config.number_or("warmup_ratio", cfg.warmup_ratio);
    cfg.check();
    return cfg;
}

SigmaConfig sigma_config_from(const Config& config, std::size_t m) {
    const bool has_scalar = config.has("sigma");
    const bool has_list = config.has("sigmas");
    const bool has_coco = config.has("coco_mean") && config.at("coco_mean").as_bool();
    if (static_cast<int>(has_scalar) + static_cast<int>(has_list) + static_cast<int>(has_coco) !=
        1) {
        throw ParamError("sigma config needs exactly one of: sigma, sigmas, coco_mean");
    }
    if (has_scalar) return SigmaConfig::uniform(m, config.at("sigma").as_number());
    if (has_coco) return SigmaConfig::coco_mean(m);
    const auto& values = config.at("sigmas").as_array();
    if (values.size() != m) {
        throw ParamError("sigma list has " + std::to_string(values.size()) +
                         " entries, vocabulary defines " + std::to_string(m));
    }
    return SigmaConfig::from_values(values);
}

std::string merge_report_to_json(const MergeReport& report) {
    nlohmann::ordered_json j;
    j["superset_size"] = report.superset_size;
    nlohmann::ordered_json coverage = nlohmann::ordered_json::object();
    for (const auto& [name, frac] : report.per_dataset_coverage) coverage[name] = frac;
    j["per_dataset_coverage"] = std::move(coverage);
    j["sparsity"] = report.sparsity;
    nlohmann::ordered_json unmapped = nlohmann::ordered_json::array();
    for (const auto& [ds, kp] : report.unmapped_keypoints) {
        unmapped.push_back(nlohmann::ordered_json{{"dataset", ds}, {"keypoint", kp}});
    }
    j["unmapped_keypoints"] = std::move(unmapped);
    j["warnings"] = report.warnings;
    return j.dump(2) + "\n";
}

}  // namespace panpose
