#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "pcbs/point_cloud.hpp"

namespace pcbs {

/// Reads a raw LiDAR scan: per point four little-endian 32-bit floats
/// (x, y, z, intensity). File length must be a multiple of 16 bytes;
/// a misaligned file raises FormatError with the offending byte offset,
/// non-finite values raise InvalidInput. An empty file is an empty cloud.
PointCloud read_kitti_bin(const std::filesystem::path& path);

/// Inverse of read_kitti_bin. Missing intensity is written as 0. The write
/// goes to a temp file renamed into place, so failures leave no partial file.
void write_kitti_bin(const std::filesystem::path& path, const PointCloud& cloud);

/// Reads per-point labels: one little-endian u32 per point, semantic class
/// in the low 16 bits (the instance id in the high 16 bits is discarded).
/// File length must be a multiple of 4. When expected_count is given, a
/// count mismatch raises InvalidInput.
std::vector<std::uint32_t> read_labels(const std::filesystem::path& path,
                                       std::optional<std::size_t> expected_count = {});

void write_labels(const std::filesystem::path& path,
                  std::span<const std::uint32_t> labels);

/// Synthetic long-tail scan: radial density proportional to rho^-k on
/// [rho_min, rho_max], azimuth uniform on [-pi, pi), height uniform on
/// [z_min, z_max]. Stands in for real scans in tests and benchmarks.
struct SynthConfig {
    std::size_t n_points = 122880;
    double rho_min = 3.0;
    double rho_max = 80.0;
    double z_min = -3.0;
    double z_max = 1.5;
    double density_exponent = 2.0; // k > 0
    std::uint64_t seed = 0;
    bool with_intensity = true;

    void validate() const; // rho_min > 0, rho_min < rho_max, k > 0, z_min < z_max
};

/// Deterministic given the seed; each point draws from its own
/// (seed, point-index) stream, so generation parallelizes without changing
/// the output. rho is drawn by inverse CDF (no rejection).
PointCloud generate_long_tail(const SynthConfig& cfg);
PointCloud generate_long_tail_serial(const SynthConfig& cfg);

/// Closed-form CDF of the radial law: P(rho <= r) for r in [rho_min, rho_max].
double long_tail_cdf(const SynthConfig& cfg, double r);

/// FNV-1a 64-bit digest, used for provenance records.
std::uint64_t fnv1a64(std::span<const std::byte> bytes);
std::uint64_t fnv1a64_file(const std::filesystem::path& path);

} // namespace pcbs
