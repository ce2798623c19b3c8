#pragma once

#include "panpose/dataset.hpp"
#include "panpose/eval.hpp"
#include "panpose/train.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace panpose {

// Synthetic two-source scene for the masking A/B comparison. Source "alpha"
// images label only the first half of the channels, source "beta" only the
// second half, so the merged training set is sparse in superset space while
// the test set stays dense. Feature planes are a noisy copy of each channel's
// clean target heatmap plus two coordinate ramps and a constant plane, which
// makes the dense targets realizable by the per-channel linear predictor.
struct SceneConfig {
    int channels = 6;            // split evenly between the two sources
    int images_alpha = 185;
    int images_beta = 15;
    int test_images = 60;
    int image_size = 64;         // square images, stride-4 heatmaps
    int stride = 4;
    double sigma = 2.0;          // heatmap cells
    double feature_noise = 0.05;
    std::uint64_t seed = 0;
};

struct SyntheticScene {
    PoseDataset train_gt;  // merged two-source training labels (sparse)
    PoseDataset test_gt;   // dense labels
    std::vector<TrainSample> train_samples;
    std::vector<TrainSample> test_samples;          // dense targets, for per-channel error
    std::map<std::int64_t, Planes<double>> test_features;  // by test image id
    std::vector<int> alpha_channels;
    std::vector<int> beta_channels;
};

SyntheticScene generate_masking_scene(const SceneConfig& config);

struct MaskingRunResult {
    double map = 0.0;
    Vector<double> per_channel_error;  // mean squared error per channel on the test set
    std::vector<EpochStats> history;
    ToyPredictor<double> predictor;
    PoseDataset predictions;
};

// Trains the toy predictor on the scene (masked or unmasked), decodes
// single-instance predictions on the test images and evaluates them with
// sigma 0.1 mAP.
MaskingRunResult run_masking_arm(const SyntheticScene& scene, bool masking_enabled,
                                 const TrainConfig& base_config);

struct MaskingComparison {
    MaskingRunResult masked;
    MaskingRunResult unmasked;
    std::vector<int> cross_channels;  // channels absent from the dominant source
    double cross_error_ratio = 0.0;   // unmasked / masked mean error on those channels
};

MaskingComparison run_masking_ab(const SceneConfig& scene_config,
                                 const TrainConfig& base_config = train_preset("toy-demo"));

std::string comparison_to_json(const MaskingComparison& cmp);

// Decodes one prediction annotation per image (global per-channel maxima).
PoseDataset predict_dataset(const ToyPredictor<double>& predictor,
                            const PoseDataset& gt,
                            const std::map<std::int64_t, Planes<double>>& features_by_image,
                            double peak_threshold = 0.1);

}  // namespace panpose
