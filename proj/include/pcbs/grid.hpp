#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pcbs/point_cloud.hpp"

namespace pcbs {

/// Polar cylindrical partition: n_radial x n_angular x n_height blocks over
/// rho in [rho_min, rho_max], theta over the full circle, z in [z_min, z_max].
/// rho_max unset means "resolve to the cloud's maximum rho" per call.
struct CylGridConfig {
    int n_radial = 64;
    int n_angular = 64;
    int n_height = 16;
    double rho_min = 0.0;
    std::optional<double> rho_max; // nullopt: data-max sentinel
    double z_min = -3.0;
    double z_max = 1.5;
    /// Default: points outside the crop range are clamped into boundary
    /// bins so no point is ever lost. When true they are left unbinned.
    bool drop_out_of_range = false;

    std::size_t total_bins() const noexcept {
        return static_cast<std::size_t>(n_radial) * n_angular * n_height;
    }

    /// Throws InvalidInput on non-positive resolutions, non-finite or
    /// inverted range bounds, or a bin count that overflows 32-bit ids.
    void validate() const;

    /// 64 x 64 x 16, rho 3 m .. data max, z -3.0 .. 1.5 m.
    static CylGridConfig semantic_kitti();
    /// 64 x 64 x 16, rho 3 .. 80 m, z -3.0 .. 3.0 m.
    static CylGridConfig semantic_poss();
};

/// Per-point bin assignment plus per-bin point lists for occupied bins,
/// stored CSR-style. Occupied bins are ordered by ascending flat id and
/// each bin's point indices ascend, so the layout is deterministic.
struct BinIndexing {
    /// bin_of_point value for points dropped by drop_out_of_range.
    static constexpr std::uint32_t kUnbinned = 0xFFFFFFFFu;

    std::vector<std::uint32_t> bin_of_point;   // length N, flat ids
    std::vector<std::uint32_t> occupied_ids;   // K ascending flat bin ids
    std::vector<std::size_t> offsets;          // K+1 prefix offsets into point_indices
    std::vector<std::uint32_t> point_indices;  // grouped by bin, ascending within bin

    std::size_t occupied_count() const noexcept { return occupied_ids.size(); } // K

    std::span<const std::uint32_t> bin_points(std::size_t k) const {
        return {point_indices.data() + offsets[k], offsets[k + 1] - offsets[k]};
    }
    std::size_t bin_point_count(std::size_t k) const noexcept {
        return offsets[k + 1] - offsets[k];
    }
};

/// Assigns every point of `cloud` to a cylindrical block.
///
/// radial bin  = clamp(floor((rho - rho_min) / d_rho), 0, R-1)
/// angular bin = floor((theta + pi) / d_theta), theta = pi wraps to P-1
/// height bin  = clamp(floor((z - z_min) / d_z), 0, Z-1)
/// flat id     = (radial * P + angular) * Z + height
///
/// Throws InvalidInput on an empty cloud or when rho_min >= resolved rho_max.
/// Parallelized over points; identical to build_bins_serial.
BinIndexing build_bins(const PointCloud& cloud, const CylGridConfig& cfg);
BinIndexing build_bins_serial(const PointCloud& cloud, const CylGridConfig& cfg);

/// Same, over an already-converted polar view.
BinIndexing build_bins(std::span<const PolarPoint> polar, const CylGridConfig& cfg);
BinIndexing build_bins_serial(std::span<const PolarPoint> polar, const CylGridConfig& cfg);

} // namespace pcbs
