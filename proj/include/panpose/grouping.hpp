#pragma once

#include "panpose/dataset.hpp"
#include "panpose/errors.hpp"
#include "panpose/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <vector>

namespace panpose {

struct GroupingConfig {
    int max_individuals = 10;
    double tag_threshold = 1.0;
};

// Greedy associative-embedding grouping. Detections are visited channel by
// channel in vocabulary order (descending score within a channel), each tag
// sampled at the detection's heatmap cell. A detection joins the group with
// the nearest mean tag if |dtag| <= tag_threshold; a within-threshold group
// that already holds this channel absorbs the detection as a duplicate (it is
// dropped). Detections farther than the threshold from every group start a
// new one, up to max_individuals; past the cap the lowest-score detections
// are the ones that get dropped. Each surviving group becomes one prediction
// annotation: detected channels carry v = 2, the annotation score is the mean
// detection score.
template <typename Scalar>
std::vector<Annotation> group_by_tags(const std::vector<Detection>& detections,
                                      const TagMap<Scalar>& tags, std::size_t vocabulary_size,
                                      const GroupingConfig& config = {}) {
    if (tags.channel_count() != vocabulary_size) {
        throw ParamError("tag map has " + std::to_string(tags.channel_count()) +
                         " channels, vocabulary defines " + std::to_string(vocabulary_size));
    }
    for (const auto& det : detections) {
        if (det.channel < 0 || static_cast<std::size_t>(det.channel) >= vocabulary_size) {
            throw ParamError("detection channel out of range");
        }
        if (det.cell_row < 0 || det.cell_col < 0 || det.cell_row >= tags.rows() ||
            det.cell_col >= tags.cols()) {
            throw ParamError("detection cell lies outside the tag map");
        }
    }

    struct Group {
        std::vector<std::pair<Detection, double>> members;  // detection, tag value
        double tag_sum = 0.0;
        std::vector<bool> has_channel;

        double mean_tag() const { return tag_sum / static_cast<double>(members.size()); }
    };

    std::vector<Group> groups;
    for (std::size_t k = 0; k < vocabulary_size; ++k) {
        std::vector<Detection> channel_dets;
        for (const auto& det : detections) {
            if (static_cast<std::size_t>(det.channel) == k) channel_dets.push_back(det);
        }
        std::stable_sort(channel_dets.begin(), channel_dets.end(),
                         [](const Detection& a, const Detection& b) { return a.score > b.score; });

        for (const auto& det : channel_dets) {
            const double tag = static_cast<double>(tags.tags[k](det.cell_row, det.cell_col));

            int nearest = -1;
            double nearest_dist = std::numeric_limits<double>::infinity();
            for (std::size_t g = 0; g < groups.size(); ++g) {
                const double dist = std::abs(groups[g].mean_tag() - tag);
                if (dist < nearest_dist) {
                    nearest_dist = dist;
                    nearest = static_cast<int>(g);
                }
            }

            if (nearest >= 0 && nearest_dist <= config.tag_threshold) {
                Group& grp = groups[nearest];
                if (grp.has_channel[k]) continue;  // duplicate of that individual's keypoint
                grp.members.emplace_back(det, tag);
                grp.tag_sum += tag;
                grp.has_channel[k] = true;
            } else if (groups.size() < static_cast<std::size_t>(config.max_individuals)) {
                Group grp;
                grp.members.emplace_back(det, tag);
                grp.tag_sum = tag;
                grp.has_channel.assign(vocabulary_size, false);
                grp.has_channel[k] = true;
                groups.push_back(std::move(grp));
            }
            // else: cap reached, detection dropped
        }
    }

    std::vector<Annotation> predictions;
    predictions.reserve(groups.size());
    for (std::size_t g = 0; g < groups.size(); ++g) {
        Annotation ann;
        ann.id = static_cast<std::int64_t>(g);
        ann.keypoints.assign(vocabulary_size, Keypoint{});
        double score_sum = 0.0;
        for (const auto& [det, tag] : groups[g].members) {
            ann.keypoints[det.channel] = {det.x, det.y, 2};
            score_sum += det.score;
        }
        ann.num_keypoints = ann.count_labeled();
        ann.score = score_sum / static_cast<double>(groups[g].members.size());
        predictions.push_back(std::move(ann));
    }
    return predictions;
}

}  // namespace panpose
