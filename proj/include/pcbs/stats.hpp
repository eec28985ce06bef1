#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "pcbs/grid.hpp"
#include "pcbs/point_cloud.hpp"
#include "pcbs/sampling.hpp"

namespace pcbs {

/// Histogram of planar distance rho over bands [e0,e1), [e1,e2), ...,
/// [e_last, inf). Band count equals edges.size().
struct RangeHistogram {
    std::vector<double> edges;       // ascending, first >= 0
    std::vector<std::size_t> counts; // one per band, sums to N
    std::vector<double> fractions;   // counts / N (all zero when N == 0)

    std::size_t bands() const noexcept { return edges.size(); }
    /// Upper boundary of band b; +inf for the last band.
    double band_hi(std::size_t b) const;
};

/// {0, 10, 20, 30, 40, 50} meters; the last band is open-ended.
std::vector<double> default_band_edges();

/// Band membership by rho, left-closed right-open; rho below the first edge
/// lands in band 0. Throws InvalidInput on unordered or negative edges.
/// Parallelized over points; identical to the serial kernel.
RangeHistogram distance_histogram(const PointCloud& cloud, std::span<const double> edges);
RangeHistogram distance_histogram_serial(const PointCloud& cloud,
                                         std::span<const double> edges);

/// Uniformity of one sampling method on one cloud, averaged over seeds.
struct UniformityReport {
    Method method = Method::kRandom;
    /// Mean over seeds of the coefficient of variation (population stddev /
    /// mean) of per-occupied-bin selected counts. Bins are the source
    /// cloud's occupied bins.
    double cv_bins = 0.0;
    /// Pooled over seeds: counts sum to seeds * m.
    RangeHistogram per_band;
};

/// Runs rs and pcb-rs with the same m over every seed and reports band
/// fractions and bin-count uniformity for each. Seeds run in parallel;
/// results are deterministic.
std::pair<UniformityReport, UniformityReport>
compare_methods(const PointCloud& cloud, const CylGridConfig& cfg, std::size_t m,
                std::span<const std::uint64_t> seeds);
std::pair<UniformityReport, UniformityReport>
compare_methods(const PointCloud& cloud, const CylGridConfig& cfg, std::size_t m,
                std::span<const std::uint64_t> seeds, std::span<const double> edges);

/// Pearson goodness-of-fit statistic of observed counts against expected
/// fractions (which are renormalized to the observed total). Bands with
/// zero expectation and zero observation are skipped.
double chi_square_statistic(std::span<const std::size_t> observed,
                            std::span<const double> expected_fractions);

/// Two-sample Pearson statistic for two count vectors over the same bands.
double chi_square_two_sample(std::span<const std::size_t> a,
                             std::span<const std::size_t> b);

/// Upper-tail probability of the chi-square distribution with `dof` degrees
/// of freedom (regularized incomplete gamma Q(dof/2, x/2)).
double chi_square_sf(double x, double dof);

/// Population coefficient of variation of a count vector: stddev / mean.
double coefficient_of_variation(std::span<const std::size_t> counts);

} // namespace pcbs
