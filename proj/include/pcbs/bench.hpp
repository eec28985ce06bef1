#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pcbs/grid.hpp"
#include "pcbs/point_cloud.hpp"
#include "pcbs/sampling.hpp"

namespace pcbs {

/// A downsampling cascade: sizes[0] points in, then one sampling stage per
/// following entry, repeated `repeats` times per timing measurement.
struct CascadeSpec {
    std::vector<std::size_t> sizes; // strictly decreasing, at least 2 entries
    int repeats = 11;
    std::vector<Method> methods = {Method::kRandom, Method::kPcbRandom,
                                   Method::kFarthestPoint};
    /// pcb-rs rows apply pcb-rs to the first stage only; later stages fall
    /// back to rs, which keeps the balanced distribution they inherit.
    bool pcb_first_only = true;

    void validate() const;
    std::string label() const; // e.g. "(4096->1024->256) x 11"
};

struct MethodTiming {
    Method method = Method::kRandom;
    double seconds = 0.0;     // median over harness runs of the full cascade x repeats
    double mad_seconds = 0.0; // median absolute deviation over harness runs
    bool unstable = false;    // mad > 20% of median
};

struct CascadeTiming {
    std::string cascade;
    std::vector<MethodTiming> rows;
};

/// Times each method over the cascade. The measured region runs the serial
/// kernels only (single-threaded by contract) and excludes cloud generation
/// and I/O; the cascade executes `repeats` times per measurement, with one
/// discarded warm-up, and the reported seconds are the median of
/// harness_runs measurements. Throws InvalidInput when the source cloud has
/// fewer than sizes[0] points.
CascadeTiming run_cascade(const CascadeSpec& spec, const PointCloud& source,
                          const CylGridConfig& cfg, std::uint64_t seed,
                          int harness_runs = 5);

/// The four cascades (4096->1024), (->256), (->64), (->16), all x 11.
std::vector<CascadeSpec> table4_preset();

std::string format_timing_table(const std::vector<CascadeTiming>& results);
std::string format_timing_csv(const std::vector<CascadeTiming>& results);

} // namespace pcbs
