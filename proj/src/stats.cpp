#include "pcbs/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pcbs/errors.hpp"
#include "pcbs/geometry.hpp"

namespace pcbs {

double RangeHistogram::band_hi(std::size_t b) const {
    return b + 1 < edges.size() ? edges[b + 1] : std::numeric_limits<double>::infinity();
}

std::vector<double> default_band_edges() { return {0.0, 10.0, 20.0, 30.0, 40.0, 50.0}; }

namespace {

void validate_edges(std::span<const double> edges) {
    if (edges.empty()) throw InvalidInput("histogram needs at least one band edge");
    if (!(edges.front() >= 0.0)) throw InvalidInput("first band edge must be >= 0");
    for (std::size_t i = 0; i < edges.size(); ++i) {
        if (!std::isfinite(edges[i])) throw InvalidInput("band edges must be finite");
        if (i > 0 && !(edges[i] > edges[i - 1]))
            throw InvalidInput("band edges must be strictly increasing");
    }
}

inline std::size_t band_of(double rho, std::span<const double> edges) noexcept {
    const auto it = std::upper_bound(edges.begin(), edges.end(), rho);
    if (it == edges.begin()) return 0; // below the first edge: clamp into band 0
    return static_cast<std::size_t>(it - edges.begin()) - 1;
}

RangeHistogram finalize_histogram(std::span<const double> edges,
                                  std::vector<std::size_t> counts) {
    RangeHistogram h;
    h.edges.assign(edges.begin(), edges.end());
    h.counts = std::move(counts);
    std::size_t total = 0;
    for (const std::size_t c : h.counts) total += c;
    h.fractions.assign(h.counts.size(), 0.0);
    if (total > 0)
        for (std::size_t b = 0; b < h.counts.size(); ++b)
            h.fractions[b] = static_cast<double>(h.counts[b]) / static_cast<double>(total);
    return h;
}

RangeHistogram histogram_impl(const PointCloud& cloud, std::span<const double> edges,
                              bool parallel) {
    validate_edges(edges);
    const std::size_t n = cloud.size();
    const std::size_t bands = edges.size();
    std::vector<std::size_t> counts(bands, 0);
    const auto sn = static_cast<std::ptrdiff_t>(n);

    if (parallel && n >= 32768) {
#pragma omp parallel
        {
            std::vector<std::size_t> local(bands, 0);
#pragma omp for schedule(static) nowait
            for (std::ptrdiff_t i = 0; i < sn; ++i) {
                const double rho = std::sqrt(cloud.x[i] * cloud.x[i] + cloud.y[i] * cloud.y[i]);
                ++local[band_of(rho, edges)];
            }
#pragma omp critical
            for (std::size_t b = 0; b < bands; ++b) counts[b] += local[b];
        }
    } else {
        for (std::ptrdiff_t i = 0; i < sn; ++i) {
            const double rho = std::sqrt(cloud.x[i] * cloud.x[i] + cloud.y[i] * cloud.y[i]);
            ++counts[band_of(rho, edges)];
        }
    }
    return finalize_histogram(edges, std::move(counts));
}

} // namespace

RangeHistogram distance_histogram(const PointCloud& cloud, std::span<const double> edges) {
    return histogram_impl(cloud, edges, true);
}

RangeHistogram distance_histogram_serial(const PointCloud& cloud,
                                         std::span<const double> edges) {
    return histogram_impl(cloud, edges, false);
}

double coefficient_of_variation(std::span<const std::size_t> counts) {
    if (counts.empty()) throw InvalidInput("cv of an empty count vector");
    double mean = 0.0;
    for (const std::size_t c : counts) mean += static_cast<double>(c);
    mean /= static_cast<double>(counts.size());
    if (mean == 0.0) return 0.0;
    double var = 0.0;
    for (const std::size_t c : counts) {
        const double d = static_cast<double>(c) - mean;
        var += d * d;
    }
    var /= static_cast<double>(counts.size());
    return std::sqrt(var) / mean;
}

std::pair<UniformityReport, UniformityReport>
compare_methods(const PointCloud& cloud, const CylGridConfig& cfg, std::size_t m,
                std::span<const std::uint64_t> seeds) {
    const auto edges = default_band_edges();
    return compare_methods(cloud, cfg, m, seeds, edges);
}

std::pair<UniformityReport, UniformityReport>
compare_methods(const PointCloud& cloud, const CylGridConfig& cfg, std::size_t m,
                std::span<const std::uint64_t> seeds, std::span<const double> edges) {
    if (seeds.empty()) throw InvalidInput("compare_methods needs at least one seed");
    validate_edges(edges);
    if (cloud.empty()) throw InvalidInput("compare_methods: empty cloud");

    const std::size_t n = cloud.size();
    const std::size_t bands = edges.size();

    // Source binning is shared by every seed.
    const auto polar = to_polar(cloud);
    const BinIndexing bins = build_bins(std::span<const PolarPoint>(polar), cfg);
    const std::size_t k = bins.occupied_count();
    std::vector<std::uint32_t> slot_of_point(n, BinIndexing::kUnbinned);
    for (std::size_t s = 0; s < k; ++s)
        for (const std::uint32_t p : bins.bin_points(s))
            slot_of_point[p] = static_cast<std::uint32_t>(s);

    struct Accum {
        std::vector<std::size_t> band_counts;
        double cv_sum = 0.0;
    };
    const std::size_t n_seeds = seeds.size();
    std::vector<Accum> rs_acc(n_seeds), pcb_acc(n_seeds);

    const auto tally = [&](std::span<const std::uint32_t> indices, Accum& acc) {
        acc.band_counts.assign(bands, 0);
        std::vector<std::size_t> per_bin(k, 0);
        for (const std::uint32_t idx : indices) {
            ++acc.band_counts[band_of(polar[idx].rho, edges)];
            const std::uint32_t s = slot_of_point[idx];
            if (s != BinIndexing::kUnbinned) ++per_bin[s];
        }
        acc.cv_sum = coefficient_of_variation(per_bin);
    };

    const auto sseeds = static_cast<std::ptrdiff_t>(n_seeds);
#pragma omp parallel for schedule(dynamic) if (n_seeds > 1)
    for (std::ptrdiff_t i = 0; i < sseeds; ++i) {
        const std::uint64_t seed = seeds[i];
        tally(random_sample(n, m, seed).indices, rs_acc[i]);
        tally(pcb_random_sample_serial(cloud, cfg, m, seed).indices, pcb_acc[i]);
    }

    const auto reduce = [&](const std::vector<Accum>& accs, Method method) {
        UniformityReport rep;
        rep.method = method;
        std::vector<std::size_t> pooled(bands, 0);
        double cv = 0.0;
        for (const Accum& a : accs) {
            for (std::size_t b = 0; b < bands; ++b) pooled[b] += a.band_counts[b];
            cv += a.cv_sum;
        }
        rep.cv_bins = cv / static_cast<double>(accs.size());
        rep.per_band = finalize_histogram(edges, std::move(pooled));
        return rep;
    };
    return {reduce(rs_acc, Method::kRandom), reduce(pcb_acc, Method::kPcbRandom)};
}

double chi_square_statistic(std::span<const std::size_t> observed,
                            std::span<const double> expected_fractions) {
    if (observed.size() != expected_fractions.size() || observed.empty())
        throw InvalidInput("chi_square_statistic: dimension mismatch");
    std::size_t total = 0;
    double frac_total = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        total += observed[i];
        if (expected_fractions[i] < 0.0)
            throw InvalidInput("chi_square_statistic: negative expected fraction");
        frac_total += expected_fractions[i];
    }
    if (total == 0 || frac_total == 0.0)
        throw InvalidInput("chi_square_statistic: empty totals");

    double stat = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double e = expected_fractions[i] / frac_total * static_cast<double>(total);
        if (e == 0.0) {
            if (observed[i] > 0) return std::numeric_limits<double>::infinity();
            continue;
        }
        const double d = static_cast<double>(observed[i]) - e;
        stat += d * d / e;
    }
    return stat;
}

double chi_square_two_sample(std::span<const std::size_t> a,
                             std::span<const std::size_t> b) {
    if (a.size() != b.size() || a.empty())
        throw InvalidInput("chi_square_two_sample: dimension mismatch");
    double na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        na += static_cast<double>(a[i]);
        nb += static_cast<double>(b[i]);
    }
    if (na == 0.0 || nb == 0.0)
        throw InvalidInput("chi_square_two_sample: empty sample");

    // Pearson statistic on the 2 x bands contingency table.
    double stat = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double row = static_cast<double>(a[i]) + static_cast<double>(b[i]);
        if (row == 0.0) continue;
        const double ea = row * na / (na + nb);
        const double eb = row * nb / (na + nb);
        const double da = static_cast<double>(a[i]) - ea;
        const double db = static_cast<double>(b[i]) - eb;
        stat += da * da / ea + db * db / eb;
    }
    return stat;
}

namespace {

// Regularized incomplete gamma pair. Series for x < a + 1, continued
// fraction (modified Lentz) otherwise.
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_cf(double a, double x) {
    constexpr double kTiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-15) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

} // namespace

double chi_square_sf(double x, double dof) {
    if (!(dof > 0.0)) throw InvalidInput("chi_square_sf: dof must be positive");
    if (!(x >= 0.0)) return 1.0;
    if (std::isinf(x)) return 0.0;
    const double a = dof / 2.0, half_x = x / 2.0;
    if (half_x == 0.0) return 1.0;
    if (half_x < a + 1.0) return 1.0 - gamma_p_series(a, half_x);
    return gamma_q_cf(a, half_x);
}

} // namespace pcbs
