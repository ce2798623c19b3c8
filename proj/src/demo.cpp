#include "panpose/demo.hpp"

#include "panpose/errors.hpp"
#include "panpose/heatmap.hpp"
#include "panpose/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace panpose {

namespace {

KeypointVocabulary demo_vocabulary(int channels) {
    std::vector<std::string> names;
    names.reserve(channels);
    for (int k = 0; k < channels; ++k) names.push_back("kp" + std::to_string(k));
    return KeypointVocabulary(std::move(names));
}

// All channels of one individual, away from the borders so decoding is clean.
std::vector<Keypoint> random_pose(SplitMix64& rng, const SceneConfig& cfg) {
    const double margin = 3.0 * cfg.sigma * cfg.stride;
    const double lo = margin;
    const double hi = static_cast<double>(cfg.image_size) - margin;
    std::vector<Keypoint> kps(cfg.channels);
    for (auto& kp : kps) {
        kp.x = lo + rng.next_double() * (hi - lo);
        kp.y = lo + rng.next_double() * (hi - lo);
        kp.v = 2;
    }
    return kps;
}

Planes<double> make_features(const std::vector<Keypoint>& pose, const SceneConfig& cfg,
                             SplitMix64& rng) {
    const ImageRecord image{0, "", cfg.image_size, cfg.image_size, ""};
    Annotation dense;
    dense.keypoints = pose;
    const auto clean = encode_targets<double>({dense}, image, cfg.sigma, cfg.stride);

    const Eigen::Index h = clean.rows();
    const Eigen::Index w = clean.cols();
    Planes<double> planes;
    planes.reserve(static_cast<std::size_t>(cfg.channels) + 3);
    for (int k = 0; k < cfg.channels; ++k) {
        Plane<double> p = clean.channels[static_cast<std::size_t>(k)];
        for (Eigen::Index r = 0; r < h; ++r) {
            for (Eigen::Index c = 0; c < w; ++c) {
                p(r, c) += cfg.feature_noise * rng.next_gaussian();
            }
        }
        planes.push_back(std::move(p));
    }
    Plane<double> row_ramp(h, w), col_ramp(h, w);
    for (Eigen::Index r = 0; r < h; ++r) {
        for (Eigen::Index c = 0; c < w; ++c) {
            row_ramp(r, c) = static_cast<double>(r) / static_cast<double>(h);
            col_ramp(r, c) = static_cast<double>(c) / static_cast<double>(w);
        }
    }
    planes.push_back(std::move(row_ramp));
    planes.push_back(std::move(col_ramp));
    planes.push_back(Plane<double>::Constant(h, w, 1.0));
    return planes;
}

Annotation labeled_subset(const std::vector<Keypoint>& pose, const std::vector<int>& channels) {
    Annotation ann;
    ann.keypoints.assign(pose.size(), Keypoint{});
    for (int k : channels) ann.keypoints[static_cast<std::size_t>(k)] = pose[k];
    ann.num_keypoints = ann.count_labeled();
    return ann;
}

}  // namespace

SyntheticScene generate_masking_scene(const SceneConfig& cfg) {
    if (cfg.channels < 2 || cfg.channels % 2 != 0) {
        throw ParamError("scene needs an even channel count >= 2");
    }
    SyntheticScene scene;
    for (int k = 0; k < cfg.channels / 2; ++k) scene.alpha_channels.push_back(k);
    for (int k = cfg.channels / 2; k < cfg.channels; ++k) scene.beta_channels.push_back(k);

    const auto vocab = demo_vocabulary(cfg.channels);
    scene.train_gt.name = "masking-demo-train";
    scene.train_gt.vocabulary = vocab;
    scene.test_gt.name = "masking-demo-test";
    scene.test_gt.vocabulary = vocab;

    SplitMix64 rng(cfg.seed);
    std::int64_t next_id = 0;

    auto add_train_image = [&](const std::vector<int>& channels, const std::string& source) {
        const std::int64_t id = next_id++;
        ImageRecord image{id, "synthetic_" + std::to_string(id) + ".png", cfg.image_size,
                          cfg.image_size, source};
        const auto pose = random_pose(rng, cfg);
        Annotation ann = labeled_subset(pose, channels);
        ann.id = id;
        ann.image_id = id;

        TrainSample sample;
        sample.features = make_features(pose, cfg, rng);
        sample.target = encode_targets<double>({ann}, image, cfg.sigma, cfg.stride);

        scene.train_gt.images.push_back(image);
        scene.train_gt.annotations.push_back(std::move(ann));
        scene.train_samples.push_back(std::move(sample));
    };
    for (int i = 0; i < cfg.images_alpha; ++i) add_train_image(scene.alpha_channels, "alpha");
    for (int i = 0; i < cfg.images_beta; ++i) add_train_image(scene.beta_channels, "beta");

    for (int i = 0; i < cfg.test_images; ++i) {
        const std::int64_t id = next_id++;
        ImageRecord image{id, "synthetic_" + std::to_string(id) + ".png", cfg.image_size,
                          cfg.image_size, "test"};
        const auto pose = random_pose(rng, cfg);
        Annotation ann;
        ann.keypoints = pose;
        ann.num_keypoints = ann.count_labeled();
        ann.id = id;
        ann.image_id = id;

        TrainSample sample;
        sample.features = make_features(pose, cfg, rng);
        sample.target = encode_targets<double>({ann}, image, cfg.sigma, cfg.stride);
        scene.test_features[id] = sample.features;
        scene.test_samples.push_back(std::move(sample));

        scene.test_gt.images.push_back(image);
        scene.test_gt.annotations.push_back(std::move(ann));
    }
    return scene;
}

PoseDataset predict_dataset(const ToyPredictor<double>& predictor, const PoseDataset& gt,
                            const std::map<std::int64_t, Planes<double>>& features_by_image,
                            double peak_threshold) {
    PoseDataset preds;
    preds.name = gt.name + "-predictions";
    preds.category_name = gt.category_name;
    preds.category_id = gt.category_id;
    preds.vocabulary = gt.vocabulary;
    preds.images = gt.images;

    std::int64_t next_ann = 0;
    for (const auto& image : gt.images) {
        auto it = features_by_image.find(image.id);
        if (it == features_by_image.end()) {
            throw ParamError("no feature planes for image id " + std::to_string(image.id));
        }
        const auto stack = predict(predictor, it->second);
        const auto detections = decode_heatmaps(stack, peak_threshold, /*single_instance=*/true);

        Annotation ann;
        ann.id = next_ann++;
        ann.image_id = image.id;
        ann.keypoints.assign(gt.vocabulary.size(), Keypoint{});
        double score_sum = 0.0;
        for (const auto& det : detections) {
            ann.keypoints[static_cast<std::size_t>(det.channel)] = {det.x, det.y, 2};
            score_sum += det.score;
        }
        ann.num_keypoints = ann.count_labeled();
        ann.score = detections.empty() ? 0.0 : score_sum / static_cast<double>(detections.size());
        preds.annotations.push_back(std::move(ann));
    }
    return preds;
}

MaskingRunResult run_masking_arm(const SyntheticScene& scene, bool masking_enabled,
                                 const TrainConfig& base_config) {
    TrainConfig cfg = base_config;
    cfg.masking_enabled = masking_enabled;

    const std::size_t m = scene.test_gt.vocabulary.size();
    const std::size_t f = scene.train_samples.front().features.size();
    auto start = ToyPredictor<double>::zeros(m, f);

    MaskingRunResult result;
    auto trained = train(start, scene.train_samples, cfg);
    result.history = std::move(trained.history);
    result.predictor = std::move(trained.predictor);

    result.per_channel_error = Vector<double>::Zero(static_cast<Eigen::Index>(m));
    for (const auto& sample : scene.test_samples) {
        const auto pred = predict(result.predictor, sample.features);
        for (std::size_t k = 0; k < m; ++k) {
            result.per_channel_error[static_cast<Eigen::Index>(k)] +=
                (pred.channels[k] - sample.target.channels[k]).square().mean();
        }
    }
    result.per_channel_error /= static_cast<double>(scene.test_samples.size());

    result.predictions = predict_dataset(result.predictor, scene.test_gt, scene.test_features);
    const auto sigmas = SigmaConfig::uniform(m, 0.1);
    result.map = evaluate(scene.test_gt, result.predictions, sigmas).map;
    return result;
}

MaskingComparison run_masking_ab(const SceneConfig& scene_config,
                                 const TrainConfig& base_config) {
    const auto scene = generate_masking_scene(scene_config);

    MaskingComparison cmp;
    cmp.masked = run_masking_arm(scene, true, base_config);
    cmp.unmasked = run_masking_arm(scene, false, base_config);
    // Channels the dominant source never labels are where unmasked training
    // drags predictions toward the all-zero target.
    cmp.cross_channels = scene_config.images_alpha >= scene_config.images_beta
                             ? scene.beta_channels
                             : scene.alpha_channels;
    double masked_err = 0.0;
    double unmasked_err = 0.0;
    for (int k : cmp.cross_channels) {
        masked_err += cmp.masked.per_channel_error[k];
        unmasked_err += cmp.unmasked.per_channel_error[k];
    }
    cmp.cross_error_ratio = masked_err > 0.0 ? unmasked_err / masked_err
                                             : std::numeric_limits<double>::infinity();
    return cmp;
}

std::string comparison_to_json(const MaskingComparison& cmp) {
    nlohmann::ordered_json j;
    j["masked_map"] = cmp.masked.map;
    j["unmasked_map"] = cmp.unmasked.map;
    j["masked_beats_unmasked"] = cmp.masked.map > cmp.unmasked.map;
    j["cross_channels"] = cmp.cross_channels;
    j["cross_error_ratio"] = cmp.cross_error_ratio;
    auto errors = [](const Vector<double>& v) {
        std::vector<double> out(v.data(), v.data() + v.size());
        return out;
    };
    j["masked_per_channel_error"] = errors(cmp.masked.per_channel_error);
    j["unmasked_per_channel_error"] = errors(cmp.unmasked.per_channel_error);
    return j.dump(2) + "\n";
}

}  // namespace panpose
