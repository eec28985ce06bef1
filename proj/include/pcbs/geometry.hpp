#pragma once

#include <vector>

#include "pcbs/point_cloud.hpp"

namespace pcbs {

/// Cartesian -> cylindrical polar conversion. rho = sqrt(x^2 + y^2),
/// theta = atan2(y, x) with atan2(0, 0) defined as 0, z unchanged.
/// Throws InvalidInput on non-finite coordinates.
/// Parallelized over points; output is identical to to_polar_serial.
std::vector<PolarPoint> to_polar(const PointCloud& cloud);

/// Single-threaded reference kernel.
std::vector<PolarPoint> to_polar_serial(const PointCloud& cloud);

} // namespace pcbs
