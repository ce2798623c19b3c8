#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace panpose {

// Ordered, unique keypoint names. Order defines the channel index k in [0, m).
class KeypointVocabulary {
public:
    KeypointVocabulary() = default;
    explicit KeypointVocabulary(std::vector<std::string> names);

    std::size_t size() const { return names_.size(); }
    bool empty() const { return names_.empty(); }
    const std::string& name(std::size_t k) const { return names_.at(k); }
    const std::vector<std::string>& names() const { return names_; }

    // Channel index of a name, or -1 when absent.
    int index_of(const std::string& name) const;
    bool contains(const std::string& name) const { return index_of(name) >= 0; }

    bool operator==(const KeypointVocabulary&) const = default;

private:
    std::vector<std::string> names_;
    std::map<std::string, int> index_;
};

struct ImageRecord {
    std::int64_t id = 0;
    std::string file_name;
    int width = 0;
    int height = 0;
    // Filled by merge: name of the dataset this image came from. Empty = untagged.
    std::string source_dataset;

    bool operator==(const ImageRecord&) const = default;
};

// One (x, y, v) triple per vocabulary channel. v: 0 absent, 1 labeled-occluded,
// 2 labeled-visible. v == 0 entries keep x == y == 0.
struct Keypoint {
    double x = 0.0;
    double y = 0.0;
    int v = 0;

    bool labeled() const { return v > 0; }
    bool operator==(const Keypoint&) const = default;
};

struct Annotation {
    std::int64_t id = 0;
    std::int64_t image_id = 0;
    std::vector<Keypoint> keypoints;
    int num_keypoints = 0;
    std::optional<std::array<double, 4>> bbox;  // x, y, w, h in pixels
    std::optional<double> score;                // predictions only

    int count_labeled() const;
    bool operator==(const Annotation&) const = default;
};

struct PoseDataset {
    std::string name;
    std::string category_name = "animal";
    int category_id = 1;
    KeypointVocabulary vocabulary;
    std::vector<ImageRecord> images;
    std::vector<Annotation> annotations;

    const ImageRecord* find_image(std::int64_t image_id) const;

    bool operator==(const PoseDataset&) const = default;
};

enum class Severity { Warning, Error };

struct Violation {
    Severity severity = Severity::Error;
    std::string where;    // "annotation 12", "image 3", ...
    std::string message;

    bool operator==(const Violation&) const = default;
};

struct ValidationReport {
    std::vector<Violation> items;

    bool empty() const { return items.empty(); }
    std::size_t error_count() const;
    std::size_t warning_count() const;
};

// Checks every dataset invariant and reports each violation with its location.
// Never throws and never mutates the input; an empty report means fully valid.
//
// Errors: duplicate ids, unresolvable image_id, keypoint-count mismatch with the
// vocabulary, num_keypoints disagreeing with the labeled count, v outside {0,1,2},
// non-positive image dimensions, empty/duplicate vocabulary names.
// Warnings: labeled keypoint outside the image bounds (source datasets contain
// off-image labels), v == 0 with nonzero coordinates.
ValidationReport validate(const PoseDataset& ds);

// Recomputes num_keypoints on every annotation. Handy after editing visibility.
void recompute_keypoint_counts(PoseDataset& ds);

}  // namespace panpose
