#pragma once

#include "panpose/dataset.hpp"
#include "panpose/types.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace panpose {

// Per-keypoint OKS tolerance constants sigma_k; the similarity kernel uses
// kappa_k = 2 * sigma_k.
struct SigmaConfig {
    Vector<double> sigmas;

    std::size_t size() const { return static_cast<std::size_t>(sigmas.size()); }

    // Same sigma for every channel, e.g. 0.1 for the lab-mouse convention.
    static SigmaConfig uniform(std::size_t m, double sigma);
    // The mean of the 17 published human-keypoint sigmas, broadcast to m
    // channels so every keypoint weighs equally.
    static SigmaConfig coco_mean(std::size_t m);
    static SigmaConfig from_values(std::vector<double> values);
};

// The 17 human-keypoint sigma constants from the reference COCO evaluation.
const std::array<double, 17>& coco_human_sigmas();
double mean_coco_sigma();

struct Bbox {
    double x = 0.0;
    double y = 0.0;
    double w = 0.0;
    double h = 0.0;

    double area() const { return w * h; }
};

// Box around the labeled keypoints, expanded by margin_px on every side, then
// clipped to the image: the origin is clamped to (0, 0) and the extent capped
// so the box stays inside the image. Throws ParamError when the annotation
// has no labeled keypoints.
Bbox heuristic_bbox(const Annotation& ann, const ImageRecord& image, int margin_px = 30);

// Object keypoint similarity in [0, 1]:
//   OKS = sum_{k: v_k>0} exp(-d_k^2 / (2 * area * (2 sigma_k)^2)) / #{k: v_k>0}
// over the ground truth's labeled keypoints; keypoints absent from the ground
// truth (the panoptic extras a model may predict) are excluded. Throws
// EvalError when the ground truth has no labeled keypoints.
double oks(const Annotation& gt, const Annotation& pred, const SigmaConfig& sigmas, double area);

struct MatchRecord {
    std::int64_t image_id = 0;
    std::int64_t prediction_id = 0;
    std::int64_t gt_id = 0;  // -1 when the prediction went unmatched
    double oks = 0.0;
    double score = 0.0;
};

struct EvalReport {
    double map = 0.0;  // mean AP over thresholds 0.50:0.05:0.95, in [0, 100]
    std::map<double, double> per_threshold_ap;
    std::vector<MatchRecord> matches;
    std::vector<std::string> warnings;
};

struct EvalConfig {
    int max_detections_per_image = 20;
    int bbox_margin_px = 30;  // for ground truths without a stored bbox
    int jobs = 1;             // parallel per-image matching; aggregation stays deterministic
};

// OKS-thresholded average precision. Per image, predictions in descending
// score order greedily claim the unmatched ground truth with the highest OKS;
// a pair counts as a true positive at threshold T when its OKS >= T. AP uses
// the all-point-interpolated precision-recall curve sampled at 101 recall
// points, and mAP is the mean over thresholds times 100. Ground truths with
// zero labeled keypoints are skipped with a warning. Deterministic: score
// ties break by annotation id.
EvalReport evaluate(const PoseDataset& gt_dataset, const PoseDataset& predictions,
                    const SigmaConfig& sigmas, const EvalConfig& config = {});

std::string report_to_json(const EvalReport& report);
std::string matches_to_csv(const std::vector<MatchRecord>& matches);

inline constexpr std::array<double, 10> kOksThresholds = {0.50, 0.55, 0.60, 0.65, 0.70,
                                                          0.75, 0.80, 0.85, 0.90, 0.95};

}  // namespace panpose
