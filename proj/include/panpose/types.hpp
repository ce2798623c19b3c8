#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace panpose {

// Dense 2D plane (h x w). Row-major so the flat binary layout matches the
// serialized heatmap format without a transpose.
template <typename Scalar>
using Plane = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
using Planes = std::vector<Plane<Scalar>>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Planef = Plane<float>;
using Planed = Plane<double>;

using MaskVector = std::vector<std::uint8_t>;  // one 0/1 flag per keypoint channel

}  // namespace panpose
