#include "pcbs/geometry.hpp"

#include <cmath>
#include <string>

#include "pcbs/errors.hpp"

namespace pcbs {

namespace {

inline PolarPoint convert_one(double x, double y, double z) noexcept {
    PolarPoint p;
    p.rho = std::sqrt(x * x + y * y);
    // atan2(0, 0) is defined as 0 so the origin lands in a fixed angular bin.
    p.theta = (x == 0.0 && y == 0.0) ? 0.0 : std::atan2(y, x);
    p.z = z;
    return p;
}

inline bool finite_point(const PointCloud& c, std::size_t i) noexcept {
    return std::isfinite(c.x[i]) && std::isfinite(c.y[i]) && std::isfinite(c.z[i]);
}

} // namespace

std::vector<PolarPoint> to_polar_serial(const PointCloud& cloud) {
    const std::size_t n = cloud.size();
    std::vector<PolarPoint> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!finite_point(cloud, i))
            throw InvalidInput("non-finite coordinate at point " + std::to_string(i));
        out[i] = convert_one(cloud.x[i], cloud.y[i], cloud.z[i]);
    }
    return out;
}

std::vector<PolarPoint> to_polar(const PointCloud& cloud) {
    const std::size_t n = cloud.size();
    std::vector<PolarPoint> out(n);
    bool all_finite = true;
    const auto sn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static) reduction(&& : all_finite) if (n >= 32768)
    for (std::ptrdiff_t i = 0; i < sn; ++i) {
        if (!finite_point(cloud, static_cast<std::size_t>(i))) {
            all_finite = false;
            continue;
        }
        out[i] = convert_one(cloud.x[i], cloud.y[i], cloud.z[i]);
    }
    if (!all_finite) {
        // Re-scan serially to report the first offending index.
        for (std::size_t i = 0; i < n; ++i)
            if (!finite_point(cloud, i))
                throw InvalidInput("non-finite coordinate at point " + std::to_string(i));
    }
    return out;
}

} // namespace pcbs
