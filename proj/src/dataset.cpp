#include "panpose/dataset.hpp"

#include "panpose/errors.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace panpose {

KeypointVocabulary::KeypointVocabulary(std::vector<std::string> names)
    : names_(std::move(names)) {
    for (std::size_t k = 0; k < names_.size(); ++k) {
        if (names_[k].empty()) {
            throw SchemaError("keypoint vocabulary contains an empty name at index " +
                              std::to_string(k));
        }
        auto [it, inserted] = index_.emplace(names_[k], static_cast<int>(k));
        if (!inserted) {
            throw SchemaError("duplicate keypoint name in vocabulary: '" + names_[k] + "'");
        }
    }
}

int KeypointVocabulary::index_of(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? -1 : it->second;
}

int Annotation::count_labeled() const {
    return static_cast<int>(
        std::count_if(keypoints.begin(), keypoints.end(),
                      [](const Keypoint& kp) { return kp.labeled(); }));
}

const ImageRecord* PoseDataset::find_image(std::int64_t image_id) const {
    for (const auto& img : images) {
        if (img.id == image_id) return &img;
    }
    return nullptr;
}

std::size_t ValidationReport::error_count() const {
    return static_cast<std::size_t>(
        std::count_if(items.begin(), items.end(),
                      [](const Violation& v) { return v.severity == Severity::Error; }));
}

std::size_t ValidationReport::warning_count() const {
    return items.size() - error_count();
}

namespace {

std::string image_loc(std::int64_t id) { return "image " + std::to_string(id); }
std::string ann_loc(std::int64_t id) { return "annotation " + std::to_string(id); }

}  // namespace

ValidationReport validate(const PoseDataset& ds) {
    ValidationReport report;
    auto add = [&report](Severity sev, std::string where, std::string message) {
        report.items.push_back({sev, std::move(where), std::move(message)});
    };

    std::set<std::string> seen_names;
    for (std::size_t k = 0; k < ds.vocabulary.size(); ++k) {
        const std::string& nm = ds.vocabulary.name(k);
        if (nm.empty()) {
            add(Severity::Error, "vocabulary", "empty keypoint name at index " + std::to_string(k));
        } else if (!seen_names.insert(nm).second) {
            add(Severity::Error, "vocabulary", "duplicate keypoint name '" + nm + "'");
        }
    }

    std::map<std::int64_t, const ImageRecord*> images_by_id;
    std::set<std::int64_t> dup_images;
    for (const auto& img : ds.images) {
        if (img.width <= 0 || img.height <= 0) {
            std::ostringstream msg;
            msg << "non-positive dimensions " << img.width << "x" << img.height;
            add(Severity::Error, image_loc(img.id), msg.str());
        }
        if (!images_by_id.emplace(img.id, &img).second && dup_images.insert(img.id).second) {
            add(Severity::Error, image_loc(img.id), "duplicate image id");
        }
    }

    const std::size_t m = ds.vocabulary.size();
    std::set<std::int64_t> ann_ids;
    for (const auto& ann : ds.annotations) {
        if (!ann_ids.insert(ann.id).second) {
            add(Severity::Error, ann_loc(ann.id), "duplicate annotation id");
        }
        auto img_it = images_by_id.find(ann.image_id);
        const ImageRecord* img = img_it == images_by_id.end() ? nullptr : img_it->second;
        if (img == nullptr) {
            add(Severity::Error, ann_loc(ann.id),
                "references unknown image id " + std::to_string(ann.image_id));
        }
        if (ann.keypoints.size() != m) {
            std::ostringstream msg;
            msg << "has " << ann.keypoints.size() << " keypoint triples, vocabulary defines " << m;
            add(Severity::Error, ann_loc(ann.id), msg.str());
            continue;
        }
        for (std::size_t k = 0; k < ann.keypoints.size(); ++k) {
            const Keypoint& kp = ann.keypoints[k];
            if (kp.v < 0 || kp.v > 2) {
                add(Severity::Error, ann_loc(ann.id),
                    "visibility " + std::to_string(kp.v) + " outside {0,1,2} on channel " +
                        std::to_string(k));
            }
            if (kp.v == 0 && (kp.x != 0.0 || kp.y != 0.0)) {
                add(Severity::Warning, ann_loc(ann.id),
                    "unlabeled keypoint '" + ds.vocabulary.name(k) + "' has nonzero coordinates");
            }
            if (kp.v > 0 && img != nullptr &&
                (kp.x < 0.0 || kp.x >= img->width || kp.y < 0.0 || kp.y >= img->height)) {
                std::ostringstream msg;
                msg << "keypoint '" << ds.vocabulary.name(k) << "' at (" << kp.x << ", " << kp.y
                    << ") lies outside image " << img->width << "x" << img->height;
                add(Severity::Warning, ann_loc(ann.id), msg.str());
            }
        }
        const int labeled = ann.count_labeled();
        if (ann.num_keypoints != labeled) {
            std::ostringstream msg;
            msg << "num_keypoints is " << ann.num_keypoints << " but " << labeled
                << " triples have v > 0";
            add(Severity::Error, ann_loc(ann.id), msg.str());
        }
        if (ann.bbox && ((*ann.bbox)[2] < 0.0 || (*ann.bbox)[3] < 0.0)) {
            add(Severity::Warning, ann_loc(ann.id), "bbox has negative extent");
        }
        if (ann.score && (*ann.score < 0.0 || *ann.score > 1.0)) {
            add(Severity::Warning, ann_loc(ann.id), "score outside [0, 1]");
        }
    }
    return report;
}

void recompute_keypoint_counts(PoseDataset& ds) {
    for (auto& ann : ds.annotations) {
        ann.num_keypoints = ann.count_labeled();
    }
}

}  // namespace panpose
