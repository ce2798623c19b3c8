#pragma once

#include "panpose/dataset.hpp"
#include "panpose/errors.hpp"
#include "panpose/types.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <string>
#include <vector>

// the flat binary stack format is defined little-endian
static_assert(std::endian::native == std::endian::little,
              "heatmap serialization assumes a little-endian host");

namespace panpose {

// m heatmap channels at image-resolution / stride, plus the per-keypoint
// mask vector n. For target stacks, channel k is all-zero whenever n[k] == 0
// and values lie in [0, 1]; prediction stacks are unconstrained.
template <typename Scalar>
struct HeatmapStack {
    Planes<Scalar> channels;  // m planes, each h x w
    MaskVector mask;          // length m, entries 0/1
    int stride = 4;

    std::size_t channel_count() const { return channels.size(); }
    Eigen::Index rows() const { return channels.empty() ? 0 : channels.front().rows(); }
    Eigen::Index cols() const { return channels.empty() ? 0 : channels.front().cols(); }

    static HeatmapStack zeros(std::size_t m, Eigen::Index h, Eigen::Index w, int stride) {
        HeatmapStack s;
        s.channels.assign(m, Plane<Scalar>::Zero(h, w));
        s.mask.assign(m, 0);
        s.stride = stride;
        return s;
    }

    bool same_shape(const HeatmapStack& other) const {
        return channel_count() == other.channel_count() && rows() == other.rows() &&
               cols() == other.cols();
    }
};

// Per-keypoint scalar embedding planes, shape-matched to a HeatmapStack.
template <typename Scalar>
struct TagMap {
    Planes<Scalar> tags;  // m planes, each h x w

    std::size_t channel_count() const { return tags.size(); }
    Eigen::Index rows() const { return tags.empty() ? 0 : tags.front().rows(); }
    Eigen::Index cols() const { return tags.empty() ? 0 : tags.front().cols(); }
};

struct Detection {
    int channel = 0;
    double x = 0.0;  // pixels, image resolution
    double y = 0.0;
    double score = 0.0;
    int cell_row = 0;  // heatmap cell the peak was found in
    int cell_col = 0;
};

inline Eigen::Index heatmap_extent(int image_extent, int stride) {
    return (image_extent + stride - 1) / stride;
}

// Renders truncated Gaussians around every labeled keypoint. The Gaussian is
// evaluated with a continuous center at (x/stride, y/stride) over a window of
// side 6*sigma + 1 cells; sigma is in heatmap cells. Channels labeled by
// several individuals take the per-pixel maximum. mask[k] = 1 iff keypoint k
// is labeled in at least one annotation; unlabeled channels stay all-zero.
template <typename Scalar>
HeatmapStack<Scalar> encode_targets(const std::vector<Annotation>& annotations,
                                    const ImageRecord& image, double sigma,
                                    int stride = 4) {
    if (!(sigma > 0.0)) throw ParamError("sigma must be positive");
    if (stride < 1) throw ParamError("stride must be >= 1");
    std::size_t m = 0;
    for (const auto& ann : annotations) m = std::max(m, ann.keypoints.size());

    const Eigen::Index h = heatmap_extent(image.height, stride);
    const Eigen::Index w = heatmap_extent(image.width, stride);
    auto stack = HeatmapStack<Scalar>::zeros(m, h, w, stride);

    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    const double inv_two_sigma_sq = 1.0 / (2.0 * sigma * sigma);

    for (const auto& ann : annotations) {
        for (std::size_t k = 0; k < ann.keypoints.size(); ++k) {
            const Keypoint& kp = ann.keypoints[k];
            if (!kp.labeled()) continue;
            stack.mask[k] = 1;

            const double cx = kp.x / stride;
            const double cy = kp.y / stride;
            const auto center_col = static_cast<Eigen::Index>(std::lround(cx));
            const auto center_row = static_cast<Eigen::Index>(std::lround(cy));

            const Eigen::Index r0 = std::max<Eigen::Index>(0, center_row - radius);
            const Eigen::Index r1 = std::min<Eigen::Index>(h - 1, center_row + radius);
            const Eigen::Index c0 = std::max<Eigen::Index>(0, center_col - radius);
            const Eigen::Index c1 = std::min<Eigen::Index>(w - 1, center_col + radius);
            Plane<Scalar>& plane = stack.channels[k];
            for (Eigen::Index r = r0; r <= r1; ++r) {
                const double dy = static_cast<double>(r) - cy;
                for (Eigen::Index c = c0; c <= c1; ++c) {
                    const double dx = static_cast<double>(c) - cx;
                    const double g = std::exp(-(dx * dx + dy * dy) * inv_two_sigma_sq);
                    plane(r, c) = std::max(plane(r, c), static_cast<Scalar>(g));
                }
            }
        }
    }
    return stack;
}

namespace detail {

template <typename Scalar>
inline Scalar plane_at(const Plane<Scalar>& p, Eigen::Index r, Eigen::Index c) {
    if (r < 0 || c < 0 || r >= p.rows() || c >= p.cols()) {
        return -std::numeric_limits<Scalar>::infinity();
    }
    return p(r, c);
}

// Quarter-cell shift toward the stronger 4-neighbor on each axis, then back
// to pixel coordinates.
template <typename Scalar>
Detection refine_peak(const Plane<Scalar>& plane, Eigen::Index r, Eigen::Index c, int channel,
                      int stride) {
    auto at = [&plane](Eigen::Index rr, Eigen::Index cc) -> double {
        if (rr < 0 || cc < 0 || rr >= plane.rows() || cc >= plane.cols()) return 0.0;
        return static_cast<double>(plane(rr, cc));
    };
    double dx = 0.0;
    double dy = 0.0;
    const double right = at(r, c + 1), left = at(r, c - 1);
    const double down = at(r + 1, c), up = at(r - 1, c);
    if (right > left) dx = 0.25;
    else if (left > right) dx = -0.25;
    if (down > up) dy = 0.25;
    else if (up > down) dy = -0.25;

    Detection det;
    det.channel = channel;
    det.cell_row = static_cast<int>(r);
    det.cell_col = static_cast<int>(c);
    det.x = (static_cast<double>(c) + dx) * stride;
    det.y = (static_cast<double>(r) + dy) * stride;
    det.score = static_cast<double>(plane(r, c));
    return det;
}

}  // namespace detail

// Extracts peaks per channel. A cell is a peak when it reaches threshold and
// dominates its 4-neighborhood (strictly greater than top/left, >= bottom/right
// so a two-cell plateau yields one detection). single_instance keeps only the
// global maximum of each channel. Results are sorted by descending score
// within each channel; channels with nothing above threshold yield nothing.
template <typename Scalar>
std::vector<Detection> decode_heatmaps(const HeatmapStack<Scalar>& stack,
                                       double threshold = 0.1,
                                       bool single_instance = false) {
    std::vector<Detection> detections;
    for (std::size_t k = 0; k < stack.channel_count(); ++k) {
        const Plane<Scalar>& plane = stack.channels[k];
        std::vector<Detection> channel_dets;
        if (single_instance) {
            Eigen::Index r = 0, c = 0;
            if (plane.size() > 0) {
                plane.maxCoeff(&r, &c);
                if (static_cast<double>(plane(r, c)) >= threshold) {
                    channel_dets.push_back(
                        detail::refine_peak(plane, r, c, static_cast<int>(k), stack.stride));
                }
            }
        } else {
            for (Eigen::Index r = 0; r < plane.rows(); ++r) {
                for (Eigen::Index c = 0; c < plane.cols(); ++c) {
                    const Scalar v = plane(r, c);
                    if (static_cast<double>(v) < threshold) continue;
                    if (v > detail::plane_at(plane, r, c - 1) &&
                        v > detail::plane_at(plane, r - 1, c) &&
                        v >= detail::plane_at(plane, r, c + 1) &&
                        v >= detail::plane_at(plane, r + 1, c)) {
                        channel_dets.push_back(
                            detail::refine_peak(plane, r, c, static_cast<int>(k), stack.stride));
                    }
                }
            }
            std::stable_sort(channel_dets.begin(), channel_dets.end(),
                             [](const Detection& a, const Detection& b) {
                                 return a.score > b.score;
                             });
        }
        detections.insert(detections.end(), channel_dets.begin(), channel_dets.end());
    }
    return detections;
}

// Flat binary layout: little-endian int32 header (m, h, w, stride), then m
// mask bytes, then m*h*w float32 channel values, row-major, channel-major.
template <typename Scalar>
std::string serialize_stack(const HeatmapStack<Scalar>& stack) {
    const std::int32_t header[4] = {static_cast<std::int32_t>(stack.channel_count()),
                                    static_cast<std::int32_t>(stack.rows()),
                                    static_cast<std::int32_t>(stack.cols()),
                                    static_cast<std::int32_t>(stack.stride)};
    std::string out;
    out.reserve(sizeof(header) + stack.mask.size() +
                sizeof(float) * stack.channel_count() * stack.rows() * stack.cols());
    out.append(reinterpret_cast<const char*>(header), sizeof(header));
    out.append(reinterpret_cast<const char*>(stack.mask.data()), stack.mask.size());
    for (const auto& plane : stack.channels) {
        for (Eigen::Index r = 0; r < plane.rows(); ++r) {
            for (Eigen::Index c = 0; c < plane.cols(); ++c) {
                const float v = static_cast<float>(plane(r, c));
                out.append(reinterpret_cast<const char*>(&v), sizeof(float));
            }
        }
    }
    return out;
}

template <typename Scalar>
HeatmapStack<Scalar> parse_stack(const std::string& bytes) {
    if (bytes.size() < 16) throw ParseError("heatmap blob too short for header");
    std::int32_t header[4];
    std::memcpy(header, bytes.data(), sizeof(header));
    const std::int64_t m = header[0], h = header[1], w = header[2], stride = header[3];
    if (m < 0 || h < 0 || w < 0 || stride < 1) {
        throw ParseError("heatmap header has invalid dimensions");
    }
    const std::size_t expect = 16 + static_cast<std::size_t>(m) +
                               sizeof(float) * static_cast<std::size_t>(m * h * w);
    if (bytes.size() != expect) {
        throw ParseError("heatmap blob size mismatch: expected " + std::to_string(expect) +
                         " bytes, got " + std::to_string(bytes.size()));
    }
    auto stack = HeatmapStack<Scalar>::zeros(static_cast<std::size_t>(m), h, w,
                                             static_cast<int>(stride));
    std::memcpy(stack.mask.data(), bytes.data() + 16, static_cast<std::size_t>(m));
    const char* p = bytes.data() + 16 + m;
    for (auto& plane : stack.channels) {
        for (Eigen::Index r = 0; r < h; ++r) {
            for (Eigen::Index c = 0; c < w; ++c) {
                float v;
                std::memcpy(&v, p, sizeof(float));
                p += sizeof(float);
                plane(r, c) = static_cast<Scalar>(v);
            }
        }
    }
    return stack;
}

}  // namespace panpose
