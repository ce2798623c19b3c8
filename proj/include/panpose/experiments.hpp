#pragma once

#include "panpose/dataset.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace panpose {

enum class SplitKind { DataRatio, SparseKeypoints };

enum class RoundingMode {
    FloorMin1,  // floor(fraction * n), at least 1 -- matches the published 1% counts
    Ceil,
    Round,
};

struct SplitSpec {
    SplitKind kind = SplitKind::DataRatio;
    double fraction = 1.0;  // in (0, 1]; 0 is a no-op for sparse drops
    std::uint64_t seed = 0;
    RoundingMode rounding = RoundingMode::FloorMin1;  // data-ratio only
};

struct SplitManifest {
    std::string kind;
    double fraction = 0.0;
    std::uint64_t seed = 0;
    std::vector<std::string> dropped_keypoints;
    std::vector<std::int64_t> kept_image_ids;
};

// Keeps a seeded uniform without-replacement sample of the images, with all
// their annotations. Image order, ids and contents are untouched. The kept
// count follows spec.rounding (default floor with a minimum of one image).
PoseDataset subsample_images(const PoseDataset& ds, const SplitSpec& spec,
                             SplitManifest* manifest = nullptr);

// Zeroes out ceil(fraction * m) keypoint channels, chosen by the seeded RNG,
// in every annotation of the training split; num_keypoints is recomputed.
// The channel choice depends only on (m, seed), so paired runs over different
// datasets drop the same channels. At least one channel must survive.
// Returns the derived dataset plus the dropped names in channel order.
std::pair<PoseDataset, std::vector<std::string>> drop_keypoints(const PoseDataset& train,
                                                                const SplitSpec& spec,
                                                                SplitManifest* manifest = nullptr);

// Turns a prediction set into a ground-truth-shaped dataset: every predicted
// keypoint becomes a labeled keypoint with v = 2, every prediction survives
// regardless of confidence, scores are stripped, and bboxes are regenerated
// with the margin heuristic.
PoseDataset synthesize_pseudo_labels(const PoseDataset& predictions, int bbox_margin_px = 30);

std::string manifest_to_json(const SplitManifest& manifest);

}  // namespace panpose
