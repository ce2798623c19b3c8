#include "panpose/experiments.hpp"

#include "panpose/errors.hpp"
#include "panpose/eval.hpp"
#include "panpose/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <set>

namespace panpose {

namespace {

std::size_t rounded_count(double fraction, std::size_t n, RoundingMode mode) {
    double raw = fraction * static_cast<double>(n);
    std::size_t count = 0;
    switch (mode) {
        case RoundingMode::FloorMin1: count = static_cast<std::size_t>(std::floor(raw)); break;
        case RoundingMode::Ceil: count = static_cast<std::size_t>(std::ceil(raw)); break;
        case RoundingMode::Round: count = static_cast<std::size_t>(std::llround(raw)); break;
    }
    count = std::max<std::size_t>(count, 1);
    return std::min(count, n);
}

}  // namespace

PoseDataset subsample_images(const PoseDataset& ds, const SplitSpec& spec,
                             SplitManifest* manifest) {
    if (spec.kind != SplitKind::DataRatio) {
        throw ParamError("subsample_images expects a data_ratio spec");
    }
    if (ds.images.empty()) throw ParamError("cannot subsample an empty dataset");
    if (!(spec.fraction > 0.0 && spec.fraction <= 1.0)) {
        throw ParamError("data-ratio fraction must lie in (0, 1]");
    }

    const std::size_t keep = rounded_count(spec.fraction, ds.images.size(), spec.rounding);
    SplitMix64 rng(spec.seed);
    auto picked = rng.sample_indices(ds.images.size(), keep);
    std::sort(picked.begin(), picked.end());  // preserve original image order

    PoseDataset out;
    out.name = ds.name;
    out.category_name = ds.category_name;
    out.category_id = ds.category_id;
    out.vocabulary = ds.vocabulary;
    std::set<std::int64_t> kept_ids;
    for (std::size_t idx : picked) {
        out.images.push_back(ds.images[idx]);
        kept_ids.insert(ds.images[idx].id);
    }
    for (const auto& ann : ds.annotations) {
        if (kept_ids.count(ann.image_id)) out.annotations.push_back(ann);
    }

    if (manifest) {
        manifest->kind = "data_ratio";
        manifest->fraction = spec.fraction;
        manifest->seed = spec.seed;
        manifest->dropped_keypoints.clear();
        manifest->kept_image_ids.clear();
        for (const auto& img : out.images) manifest->kept_image_ids.push_back(img.id);
    }
    return out;
}

std::pair<PoseDataset, std::vector<std::string>> drop_keypoints(const PoseDataset& train,
                                                                const SplitSpec& spec,
                                                                SplitManifest* manifest) {
    if (spec.kind != SplitKind::SparseKeypoints) {
        throw ParamError("drop_keypoints expects a sparse_keypoints spec");
    }
    if (spec.fraction < 0.0 || spec.fraction > 1.0) {
        throw ParamError("sparse-drop fraction must lie in [0, 1]");
    }
    const std::size_t m = train.vocabulary.size();
    if (m == 0) throw ParamError("dataset has an empty vocabulary");

    std::vector<std::string> dropped_names;
    PoseDataset out = train;
    if (spec.fraction > 0.0) {
        const auto n_drop =
            static_cast<std::size_t>(std::ceil(spec.fraction * static_cast<double>(m)));
        if (n_drop >= m) {
            throw ParamError("dropping " + std::to_string(n_drop) + " of " + std::to_string(m) +
                             " channels would leave none; at least one must survive");
        }
        // Channel choice depends only on (m, seed).
        SplitMix64 rng(spec.seed);
        auto picked = rng.sample_indices(m, n_drop);
        std::sort(picked.begin(), picked.end());
        for (std::size_t k : picked) dropped_names.push_back(train.vocabulary.name(k));

        for (auto& ann : out.annotations) {
            for (std::size_t k : picked) {
                if (k < ann.keypoints.size()) ann.keypoints[k] = Keypoint{};
            }
            ann.num_keypoints = ann.count_labeled();
        }
    }

    if (manifest) {
        manifest->kind = "sparse_keypoints";
        manifest->fraction = spec.fraction;
        manifest->seed = spec.seed;
        manifest->dropped_keypoints = dropped_names;
        manifest->kept_image_ids.clear();
        for (const auto& img : out.images) manifest->kept_image_ids.push_back(img.id);
    }
    return {std::move(out), std::move(dropped_names)};
}

PoseDataset synthesize_pseudo_labels(const PoseDataset& predictions, int bbox_margin_px) {
    PoseDataset out;
    out.name = predictions.name.empty() ? "pseudo" : predictions.name + "-pseudo";
    out.category_name = predictions.category_name;
    out.category_id = predictions.category_id;
    out.vocabulary = predictions.vocabulary;
    out.images = predictions.images;

    for (const auto& pred : predictions.annotations) {
        const ImageRecord* image = predictions.find_image(pred.image_id);
        if (image == nullptr) {
            throw SchemaError("prediction " + std::to_string(pred.id) +
                              " references unknown image id " + std::to_string(pred.image_id));
        }
        Annotation ann;
        ann.id = pred.id;
        ann.image_id = pred.image_id;
        ann.keypoints.reserve(pred.keypoints.size());
        for (const auto& kp : pred.keypoints) {
            // every predicted keypoint becomes visible-and-annotated
            ann.keypoints.push_back(kp.labeled() ? Keypoint{kp.x, kp.y, 2} : Keypoint{});
        }
        ann.num_keypoints = ann.count_labeled();
        ann.score.reset();
        if (ann.num_keypoints > 0) {
            const Bbox box = heuristic_bbox(ann, *image, bbox_margin_px);
            ann.bbox = {{box.x, box.y, box.w, box.h}};
        }
        out.annotations.push_back(std::move(ann));
    }
    return out;
}

std::string manifest_to_json(const SplitManifest& manifest) {
    nlohmann::ordered_json j;
    j["kind"] = manifest.kind;
    j["fraction"] = manifest.fraction;
    j["seed"] = manifest.seed;
    j["dropped_keypoints"] = manifest.dropped_keypoints;
    j["kept_image_ids"] = manifest.kept_image_ids;
    return j.dump(2) + "\n";
}

}  // namespace panpose
