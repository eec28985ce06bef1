// The OpenMP kernels must reproduce the serial reference output bit for
// bit: per-point conversions are pure, per-bin sampling streams derive from
// (seed, bin id), and integer tallies commute.

#include <doctest.h>

#include <vector>

#include "pcbs/geometry.hpp"
#include "pcbs/grid.hpp"
#include "pcbs/io_synth.hpp"
#include "pcbs/sampling.hpp"
#include "pcbs/stats.hpp"

using namespace pcbs;

namespace {

// Big enough to clear every parallel-dispatch threshold.
PointCloud big_cloud(std::uint64_t seed) {
    SynthConfig cfg;
    cfg.n_points = 120000;
    cfg.seed = seed;
    return generate_long_tail_serial(cfg);
}

} // namespace

TEST_CASE("parallel == serial: generate_long_tail") {
    SynthConfig cfg;
    cfg.n_points = 120000;
    cfg.seed = 3;
    const PointCloud serial = generate_long_tail_serial(cfg);
    const PointCloud parallel = generate_long_tail(cfg);
    CHECK(serial.x == parallel.x);
    CHECK(serial.y == parallel.y);
    CHECK(serial.z == parallel.z);
    CHECK(serial.intensity == parallel.intensity);
}

TEST_CASE("parallel == serial: to_polar") {
    const PointCloud cloud = big_cloud(5);
    const auto serial = to_polar_serial(cloud);
    const auto parallel = to_polar(cloud);
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        CHECK(serial[i].rho == parallel[i].rho);
        CHECK(serial[i].theta == parallel[i].theta);
        CHECK(serial[i].z == parallel[i].z);
    }
}

TEST_CASE("parallel == serial: build_bins") {
    const PointCloud cloud = big_cloud(7);
    const CylGridConfig cfg = CylGridConfig::semantic_kitti();
    const BinIndexing serial = build_bins_serial(cloud, cfg);
    const BinIndexing parallel = build_bins(cloud, cfg);
    CHECK(serial.bin_of_point == parallel.bin_of_point);
    CHECK(serial.occupied_ids == parallel.occupied_ids);
    CHECK(serial.offsets == parallel.offsets);
    CHECK(serial.point_indices == parallel.point_indices);
}

TEST_CASE("parallel == serial: pcb_random_sample across seeds and ratios") {
    const PointCloud cloud = big_cloud(9);
    const CylGridConfig cfg = CylGridConfig::semantic_kitti();
    for (const std::size_t m : {cloud.size() / 4, cloud.size() / 16, std::size_t{999}}) {
        for (std::uint64_t seed = 0; seed < 3; ++seed) {
            const SampleResult serial = pcb_random_sample_serial(cloud, cfg, m, seed);
            const SampleResult parallel = pcb_random_sample(cloud, cfg, m, seed);
            CHECK(serial.indices == parallel.indices);
            CHECK(serial.duplicated == parallel.duplicated);
        }
    }
}

TEST_CASE("parallel == serial: farthest_point_sample") {
    SynthConfig cfg;
    cfg.n_points = 20000; // quadratic kernel, keep moderate
    cfg.seed = 11;
    const PointCloud cloud = generate_long_tail_serial(cfg);
    const SampleResult serial = farthest_point_sample_serial(cloud, 512, 0);
    const SampleResult parallel = farthest_point_sample(cloud, 512, 0);
    CHECK(serial.indices == parallel.indices);
}

TEST_CASE("parallel == serial: distance_histogram") {
    const PointCloud cloud = big_cloud(13);
    const auto edges = default_band_edges();
    const RangeHistogram serial = distance_histogram_serial(cloud, edges);
    const RangeHistogram parallel = distance_histogram(cloud, edges);
    CHECK(serial.counts == parallel.counts);
    CHECK(serial.fractions == parallel.fractions);
}
