#include "pcbs/point_cloud.hpp"

#include <cmath>
#include <string>

#include "pcbs/errors.hpp"

namespace pcbs {

void PointCloud::reserve(std::size_t n) {
    x.reserve(n);
    y.reserve(n);
    z.reserve(n);
}

void PointCloud::push_back(double px, double py, double pz) {
    x.push_back(px);
    y.push_back(py);
    z.push_back(pz);
}

void PointCloud::validate() const {
    const std::size_t n = x.size();
    if (y.size() != n || z.size() != n)
        throw InvalidInput("point cloud coordinate columns disagree in length");
    if (!intensity.empty() && intensity.size() != n)
        throw InvalidInput("intensity column length " + std::to_string(intensity.size()) +
                           " does not match point count " + std::to_string(n));
    if (!labels.empty() && labels.size() != n)
        throw InvalidInput("label column length " + std::to_string(labels.size()) +
                           " does not match point count " + std::to_string(n));
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(x[i]) || !std::isfinite(y[i]) || !std::isfinite(z[i]))
            throw InvalidInput("non-finite coordinate at point " + std::to_string(i));
    }
}

PointCloud gather(const PointCloud& cloud, std::span<const std::uint32_t> indices) {
    const std::size_t n = cloud.size();
    PointCloud out;
    out.reserve(indices.size());
    if (cloud.has_intensity()) out.intensity.reserve(indices.size());
    if (cloud.has_labels()) out.labels.reserve(indices.size());
    for (const std::uint32_t idx : indices) {
        if (idx >= n)
            throw InvalidInput("gather index " + std::to_string(idx) +
                               " out of range for cloud of " + std::to_string(n));
        out.push_back(cloud.x[idx], cloud.y[idx], cloud.z[idx]);
        if (cloud.has_intensity()) out.intensity.push_back(cloud.intensity[idx]);
        if (cloud.has_labels()) out.labels.push_back(cloud.labels[idx]);
    }
    return out;
}

} // namespace pcbs
