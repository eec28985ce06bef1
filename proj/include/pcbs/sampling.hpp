#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pcbs/grid.hpp"
#include "pcbs/point_cloud.hpp"

namespace pcbs {

enum class Method { kRandom, kPcbRandom, kFarthestPoint };

const char* method_name(Method m); // "rs" | "pcb-rs" | "fps"
Method method_from_name(const std::string& name);

/// Index list into the source cloud, length exactly m.
struct SampleResult {
    std::vector<std::uint32_t> indices;
    Method method = Method::kRandom;
    /// RNG seed for rs / pcb-rs; the start index for fps (which is
    /// deterministic and takes no seed).
    std::uint64_t seed = 0;
    /// True iff any index repeats; only possible when fewer source points
    /// than m are available.
    bool duplicated = false;
};

/// Per-occupied-bin sample quotas. quotas[i] points are drawn from the bin
/// with flat id bin_ids[i]; the quotas sum to m.
struct QuotaPlan {
    std::vector<std::uint32_t> bin_ids;
    std::vector<std::size_t> quotas;
};

/// Uniform m-subset of {0..n_points-1} via shuffle-and-slice (Fisher-Yates
/// prefix). When n_points < m the result holds every point once, in
/// shuffled order, followed by m - n_points uniform draws with replacement.
/// Throws InvalidInput when n_points == 0 or m == 0.
SampleResult random_sample(std::size_t n_points, std::size_t m, std::uint64_t seed);

/// Balanced water-filling allocation of m draws over bins with the given
/// point counts. A common level rises until the total reaches m, each bin
/// contributing at most its count; the remainder goes +1 each to unsaturated
/// bins at evenly spaced positions of the ascending-id order, so small
/// samples stay spread across the id range. Among unsaturated bins quotas
/// differ by at most 1.
/// When the counts sum to less than m, every bin is quoted its full count
/// and the shortfall is spread proportionally (largest remainder, ties to
/// the smallest id); the excess is drawn with replacement downstream.
/// bin_ids in the returned plan are positions 0..K-1.
/// Throws InvalidInput when K == 0, m == 0, or all counts are zero.
QuotaPlan allocate_quotas(std::span<const std::size_t> bin_counts, std::size_t m);

/// Polar cylinder balanced random sampling: convert to polar, divide into
/// cylindrical blocks, allocate per-block quotas, shuffle-and-slice inside
/// every block, concatenate, then shuffle the result once more. Per-block
/// randomness derives from (seed, flat bin id), so the parallel version is
/// bit-identical to the serial one.
SampleResult pcb_random_sample(const PointCloud& cloud, const CylGridConfig& cfg,
                               std::size_t m, std::uint64_t seed);
SampleResult pcb_random_sample_serial(const PointCloud& cloud, const CylGridConfig& cfg,
                                      std::size_t m, std::uint64_t seed);

/// Greedy farthest point sampling in 3D Euclidean distance, starting from
/// start_index. Keeps an N-length nearest-selected-distance array updated in
/// O(N) per step. Ties break to the smallest index. Deterministic.
/// Throws InvalidInput when the cloud is empty, m == 0, m > N, or
/// start_index >= N (duplication is undefined for fps).
SampleResult farthest_point_sample(const PointCloud& cloud, std::size_t m,
                                   std::size_t start_index = 0);
SampleResult farthest_point_sample_serial(const PointCloud& cloud, std::size_t m,
                                          std::size_t start_index = 0);

} // namespace pcbs
