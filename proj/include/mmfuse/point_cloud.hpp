#pragma once

#include <cstddef>
#include <vector>

#include "mmfuse/core_types.hpp"

namespace mmfuse {

enum class CloudKind { intensity, doppler };

/// One point of an intensity or Doppler cloud. For intensity clouds
/// `value` is the MVDR intensity and `velocity` is unused; for Doppler
/// clouds `value` is the power and `velocity` the radial velocity in m/s.
struct CloudPoint {
    Vec3 position = Vec3::Zero();
    double value = 0.0;
    double velocity = 0.0;
    std::size_t grid_index = 0;  // flat index into the source grid
    RadarRole source = RadarRole::horizontal;
};

struct PointCloud {
    CloudKind kind = CloudKind::intensity;
    std::size_t frame_index = 0;
    std::vector<CloudPoint> points;

    std::size_t size() const { return points.size(); }
};

}  // namespace mmfuse
