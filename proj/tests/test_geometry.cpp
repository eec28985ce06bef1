#include <doctest.h>

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "pcbs/errors.hpp"
#include "pcbs/geometry.hpp"
#include "pcbs/rng.hpp"

using namespace pcbs;

namespace {

PointCloud make_cloud(std::initializer_list<std::array<double, 3>> pts) {
    PointCloud c;
    for (const auto& p : pts) c.push_back(p[0], p[1], p[2]);
    return c;
}

PointCloud random_cloud(std::size_t n, std::uint64_t seed, double magnitude = 1000.0) {
    RngStream rng(seed, 0);
    PointCloud c;
    c.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        c.push_back(magnitude * (2.0 * rng.next_double() - 1.0),
                    magnitude * (2.0 * rng.next_double() - 1.0),
                    magnitude * (2.0 * rng.next_double() - 1.0));
    return c;
}

} // namespace

TEST_CASE("to_polar: axis-aligned point") {
    const auto polar = to_polar_serial(make_cloud({{1.0, 0.0, 0.5}}));
    CHECK(polar[0].rho == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(polar[0].theta == 0.0);
    CHECK(polar[0].z == 0.5);
}

TEST_CASE("to_polar: origin maps to rho 0, theta 0") {
    for (const double x0 : {0.0, -0.0}) {
        const auto polar = to_polar_serial(make_cloud({{x0, 0.0, 0.0}}));
        CHECK(polar[0].rho == 0.0);
        CHECK(polar[0].theta == 0.0);
        CHECK(polar[0].z == 0.0);
    }
}

TEST_CASE("to_polar: 3-4-5 triangle") {
    const auto polar = to_polar_serial(make_cloud({{-3.0, 4.0, 1.0}}));
    CHECK(polar[0].rho == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(polar[0].theta == doctest::Approx(std::atan2(4.0, -3.0)).epsilon(1e-15));
    CHECK(polar[0].theta == doctest::Approx(2.2143).epsilon(1e-4));
    CHECK(polar[0].z == 1.0);
}

TEST_CASE("to_polar: output length matches and z passes through") {
    const auto cloud = random_cloud(1000, 5);
    const auto polar = to_polar_serial(cloud);
    REQUIRE(polar.size() == cloud.size());
    for (std::size_t i = 0; i < polar.size(); ++i) CHECK(polar[i].z == cloud.z[i]);
}

TEST_CASE("to_polar: round trip within 1e-9 m for coordinates up to 1000 m") {
    const auto cloud = random_cloud(5000, 17, 1000.0);
    const auto polar = to_polar_serial(cloud);
    for (std::size_t i = 0; i < polar.size(); ++i) {
        const double rx = polar[i].rho * std::cos(polar[i].theta);
        const double ry = polar[i].rho * std::sin(polar[i].theta);
        CHECK(std::abs(rx - cloud.x[i]) < 1e-9);
        CHECK(std::abs(ry - cloud.y[i]) < 1e-9);
        CHECK(polar[i].z == cloud.z[i]);
    }
}

TEST_CASE("to_polar: rho scales with uniform planar scaling") {
    const auto cloud = random_cloud(200, 23, 50.0);
    const auto base = to_polar_serial(cloud);
    for (const double s : {0.5, 2.0, 17.0}) {
        PointCloud scaled = cloud;
        for (std::size_t i = 0; i < scaled.size(); ++i) {
            scaled.x[i] *= s;
            scaled.y[i] *= s;
        }
        const auto polar = to_polar_serial(scaled);
        for (std::size_t i = 0; i < polar.size(); ++i)
            CHECK(polar[i].rho == doctest::Approx(s * base[i].rho).epsilon(1e-12));
    }
}

TEST_CASE("to_polar: theta stays in [-pi, pi]") {
    const auto polar = to_polar_serial(random_cloud(2000, 31));
    for (const auto& p : polar) {
        CHECK(p.theta >= -std::numbers::pi);
        CHECK(p.theta <= std::numbers::pi);
        CHECK(p.rho >= 0.0);
    }
}

TEST_CASE("to_polar: non-finite coordinates are rejected") {
    auto cloud = make_cloud({{1.0, 2.0, 3.0}});
    cloud.push_back(std::numeric_limits<double>::quiet_NaN(), 0.0, 0.0);
    CHECK_THROWS_AS(to_polar_serial(cloud), InvalidInput);
    CHECK_THROWS_AS(to_polar(cloud), InvalidInput);
    cloud.x[1] = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(to_polar_serial(cloud), InvalidInput);
}

TEST_CASE("point cloud: validate flags mismatched attribute lengths") {
    auto cloud = make_cloud({{1, 2, 3}, {4, 5, 6}});
    cloud.validate();
    cloud.intensity = {0.5f};
    CHECK_THROWS_AS(cloud.validate(), InvalidInput);
    cloud.intensity = {0.5f, 0.25f};
    cloud.validate();
    cloud.labels = {1, 2, 3};
    CHECK_THROWS_AS(cloud.validate(), InvalidInput);
}

TEST_CASE("gather: picks rows with attributes and allows repeats") {
    auto cloud = make_cloud({{1, 2, 3}, {4, 5, 6}, {7, 8, 9}});
    cloud.intensity = {0.1f, 0.2f, 0.3f};
    cloud.labels = {10, 20, 30};
    const std::vector<std::uint32_t> idx = {2, 0, 2};
    const PointCloud g = gather(cloud, idx);
    REQUIRE(g.size() == 3);
    CHECK(g.x[0] == 7.0);
    CHECK(g.labels[1] == 10);
    CHECK(g.intensity[2] == 0.3f);
    CHECK_THROWS_AS(gather(cloud, std::vector<std::uint32_t>{3}), InvalidInput);
}
