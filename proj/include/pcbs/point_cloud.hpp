#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace pcbs {

/// Columnar point container. Coordinates are meters. Intensity and labels
/// are optional; when present they have exactly one entry per point, so
/// sampling can return index lists and gather every attribute in one pass.
struct PointCloud {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> z;
    std::vector<float> intensity;       // empty or size() entries in [0, 1]
    std::vector<std::uint32_t> labels;  // empty or size() class ids

    std::size_t size() const noexcept { return x.size(); }
    bool empty() const noexcept { return x.empty(); }
    bool has_intensity() const noexcept { return !intensity.empty(); }
    bool has_labels() const noexcept { return !labels.empty(); }

    void reserve(std::size_t n);
    void push_back(double px, double py, double pz);

    /// Checks column lengths and coordinate finiteness.
    /// Throws InvalidInput on violation.
    void validate() const;
};

struct PolarPoint {
    double rho;   // sqrt(x^2 + y^2), meters
    double theta; // atan2(y, x), radians in [-pi, pi]
    double z;     // meters, passed through
};

/// New cloud holding cloud[indices[i]] for each i. Indices may repeat.
PointCloud gather(const PointCloud& cloud, std::span<const std::uint32_t> indices);

} // namespace pcbs
