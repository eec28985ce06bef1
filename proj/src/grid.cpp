#include "pcbs/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "pcbs/errors.hpp"
#include "pcbs/geometry.hpp"

namespace pcbs {

void CylGridConfig::validate() const {
    if (n_radial < 1 || n_angular < 1 || n_height < 1)
        throw InvalidInput("grid resolution must be positive in all three dimensions");
    if (total_bins() > (1ull << 31))
        throw InvalidInput("grid resolution exceeds 2^31 bins");
    if (!std::isfinite(rho_min) || !std::isfinite(z_min) || !std::isfinite(z_max))
        throw InvalidInput("grid range bounds must be finite");
    if (rho_max) {
        if (!std::isfinite(*rho_max))
            throw InvalidInput("rho_max must be finite or the data-max sentinel");
        if (rho_min >= *rho_max)
            throw InvalidInput("rho_min must be below rho_max");
    }
    if (z_min >= z_max)
        throw InvalidInput("z_min must be below z_max");
}

CylGridConfig CylGridConfig::semantic_kitti() {
    CylGridConfig cfg;
    cfg.n_radial = 64;
    cfg.n_angular = 64;
    cfg.n_height = 16;
    cfg.rho_min = 3.0;
    cfg.rho_max.reset(); // 3 m .. max(.)
    cfg.z_min = -3.0;
    cfg.z_max = 1.5;
    return cfg;
}

CylGridConfig CylGridConfig::semantic_poss() {
    CylGridConfig cfg = semantic_kitti();
    cfg.rho_max = 80.0;
    cfg.z_max = 3.0;
    return cfg;
}

namespace {

constexpr std::uint32_t kUnbinned = BinIndexing::kUnbinned;

struct BinParams {
    double rho_min, rho_max, d_rho;
    double z_min, z_max, d_z;
    double d_theta;
    int R, P, Z;
    bool drop;
};

inline std::uint32_t assign_bin(const PolarPoint& p, const BinParams& g) noexcept {
    if (g.drop && (p.rho < g.rho_min || p.rho > g.rho_max || p.z < g.z_min || p.z > g.z_max))
        return kUnbinned;

    auto clamp_bin = [](double v, int hi) noexcept {
        const auto b = static_cast<long long>(std::floor(v));
        if (b < 0) return 0;
        if (b >= hi) return hi - 1;
        return static_cast<int>(b);
    };
    const int r = clamp_bin((p.rho - g.rho_min) / g.d_rho, g.R);
    // theta in [-pi, pi]; the +pi endpoint wraps into the last sector.
    int a = static_cast<int>(std::floor((p.theta + std::numbers::pi) / g.d_theta));
    if (a >= g.P) a = g.P - 1;
    if (a < 0) a = 0;
    const int h = clamp_bin((p.z - g.z_min) / g.d_z, g.Z);
    return static_cast<std::uint32_t>((static_cast<std::size_t>(r) * g.P + a) * g.Z + h);
}

BinParams make_params(std::span<const PolarPoint> polar, const CylGridConfig& cfg,
                      bool parallel) {
    cfg.validate();
    if (polar.empty())
        throw InvalidInput("cannot bin an empty point cloud");

    double rho_max;
    if (cfg.rho_max) {
        rho_max = *cfg.rho_max;
    } else {
        // Data-max sentinel. max is exact, so the reduction order is free.
        const auto n = static_cast<std::ptrdiff_t>(polar.size());
        double m = 0.0;
        if (parallel) {
#pragma omp parallel for schedule(static) reduction(max : m) if (n >= 32768)
            for (std::ptrdiff_t i = 0; i < n; ++i) m = std::max(m, polar[i].rho);
        } else {
            for (std::ptrdiff_t i = 0; i < n; ++i) m = std::max(m, polar[i].rho);
        }
        rho_max = m;
        if (cfg.rho_min >= rho_max)
            throw InvalidInput("rho_min " + std::to_string(cfg.rho_min) +
                               " is not below the resolved rho_max " + std::to_string(rho_max));
    }

    BinParams g;
    g.rho_min = cfg.rho_min;
    g.rho_max = rho_max;
    g.z_min = cfg.z_min;
    g.z_max = cfg.z_max;
    g.R = cfg.n_radial;
    g.P = cfg.n_angular;
    g.Z = cfg.n_height;
    g.d_rho = (rho_max - cfg.rho_min) / cfg.n_radial;
    g.d_theta = 2.0 * std::numbers::pi / cfg.n_angular;
    g.d_z = (cfg.z_max - cfg.z_min) / cfg.n_height;
    g.drop = cfg.drop_out_of_range;
    return g;
}

// Groups point indices by bin. Occupied bins ascend and each bin's list
// ascends, regardless of which construction path runs.
void build_occupied_lists(BinIndexing& out, std::size_t total_bins) {
    const std::size_t n = out.bin_of_point.size();

    // Dense counting sort for moderate bin spaces, pair sort otherwise.
    // Both paths produce the same layout.
    if (total_bins <= (1u << 22) && total_bins <= 16 * n) {
        std::vector<std::uint32_t> count(total_bins, 0);
        std::size_t kept = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const std::uint32_t b = out.bin_of_point[i];
            if (b == kUnbinned) continue;
            ++count[b];
            ++kept;
        }
        std::size_t k = 0;
        for (std::size_t b = 0; b < total_bins; ++b)
            if (count[b] != 0) ++k;

        out.occupied_ids.resize(k);
        out.offsets.resize(k + 1);
        out.point_indices.resize(kept);

        // Repurpose count[b] as the occupied-slot index of bin b.
        std::size_t pos = 0, off = 0;
        out.offsets[0] = 0;
        for (std::size_t b = 0; b < total_bins; ++b) {
            if (count[b] == 0) continue;
            out.occupied_ids[pos] = static_cast<std::uint32_t>(b);
            off += count[b];
            out.offsets[pos + 1] = off;
            count[b] = static_cast<std::uint32_t>(pos);
            ++pos;
        }
        std::vector<std::size_t> cursor(out.offsets.begin(), out.offsets.end() - 1);
        for (std::size_t i = 0; i < n; ++i) {
            const std::uint32_t b = out.bin_of_point[i];
            if (b == kUnbinned) continue;
            out.point_indices[cursor[count[b]]++] = static_cast<std::uint32_t>(i);
        }
    } else {
        std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
        pairs.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            const std::uint32_t b = out.bin_of_point[i];
            if (b != kUnbinned) pairs.emplace_back(b, static_cast<std::uint32_t>(i));
        }
        std::sort(pairs.begin(), pairs.end());

        out.point_indices.resize(pairs.size());
        out.offsets.push_back(0);
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            if (i == 0 || pairs[i].first != pairs[i - 1].first) {
                out.occupied_ids.push_back(pairs[i].first);
                if (i != 0) out.offsets.push_back(i);
            }
            out.point_indices[i] = pairs[i].second;
        }
        out.offsets.push_back(pairs.size());
    }
}

BinIndexing build_impl(std::span<const PolarPoint> polar, const CylGridConfig& cfg,
                       bool parallel) {
    const BinParams g = make_params(polar, cfg, parallel);
    const std::size_t n = polar.size();

    BinIndexing out;
    out.bin_of_point.resize(n);
    const auto sn = static_cast<std::ptrdiff_t>(n);
    if (parallel) {
#pragma omp parallel for schedule(static) if (n >= 32768)
        for (std::ptrdiff_t i = 0; i < sn; ++i)
            out.bin_of_point[i] = assign_bin(polar[i], g);
    } else {
        for (std::ptrdiff_t i = 0; i < sn; ++i)
            out.bin_of_point[i] = assign_bin(polar[i], g);
    }

    build_occupied_lists(out, cfg.total_bins());
    return out;
}

} // namespace

BinIndexing build_bins(std::span<const PolarPoint> polar, const CylGridConfig& cfg) {
    return build_impl(polar, cfg, true);
}

BinIndexing build_bins_serial(std::span<const PolarPoint> polar, const CylGridConfig& cfg) {
    return build_impl(polar, cfg, false);
}

BinIndexing build_bins(const PointCloud& cloud, const CylGridConfig& cfg) {
    const auto polar = to_polar(cloud);
    return build_impl(polar, cfg, true);
}

BinIndexing build_bins_serial(const PointCloud& cloud, const CylGridConfig& cfg) {
    const auto polar = to_polar_serial(cloud);
    return build_impl(polar, cfg, false);
}

} // namespace pcbs
