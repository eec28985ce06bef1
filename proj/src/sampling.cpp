#include "pcbs/sampling.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "pcbs/errors.hpp"
#include "pcbs/geometry.hpp"
#include "pcbs/rng.hpp"

namespace pcbs {

const char* method_name(Method m) {
    switch (m) {
        case Method::kRandom: return "rs";
        case Method::kPcbRandom: return "pcb-rs";
        case Method::kFarthestPoint: return "fps";
    }
    return "?";
}

Method method_from_name(const std::string& name) {
    if (name == "rs") return Method::kRandom;
    if (name == "pcb-rs") return Method::kPcbRandom;
    if (name == "fps") return Method::kFarthestPoint;
    throw InvalidInput("unknown sampling method '" + name + "' (rs | pcb-rs | fps)");
}

SampleResult random_sample(std::size_t n_points, std::size_t m, std::uint64_t seed) {
    if (n_points == 0) throw InvalidInput("random_sample: empty input");
    if (m == 0) throw InvalidInput("random_sample: sample size must be positive");

    RngStream rng(seed, streams::kRandomSample);
    std::vector<std::uint32_t> ids(n_points);
    std::iota(ids.begin(), ids.end(), 0u);

    SampleResult out;
    out.method = Method::kRandom;
    out.seed = seed;
    if (m <= n_points) {
        shuffle_prefix(ids, m, rng);
        ids.resize(m);
        out.indices = std::move(ids);
        out.duplicated = false;
    } else {
        // Keep every point once, then pad with uniform replacement draws.
        shuffle_all(ids, rng);
        ids.reserve(m);
        for (std::size_t i = n_points; i < m; ++i)
            ids.push_back(static_cast<std::uint32_t>(rng.next_below(n_points)));
        out.indices = std::move(ids);
        out.duplicated = true;
    }
    return out;
}

QuotaPlan allocate_quotas(std::span<const std::size_t> bin_counts, std::size_t m) {
    const std::size_t k = bin_counts.size();
    if (k == 0) throw InvalidInput("allocate_quotas: no bins");
    if (m == 0) throw InvalidInput("allocate_quotas: sample size must be positive");

    std::size_t total = 0;
    std::size_t max_count = 0;
    for (const std::size_t c : bin_counts) {
        total += c;
        max_count = std::max(max_count, c);
    }
    if (total == 0) throw InvalidInput("allocate_quotas: all bin counts are zero");

    QuotaPlan plan;
    plan.bin_ids.resize(k);
    std::iota(plan.bin_ids.begin(), plan.bin_ids.end(), 0u);
    plan.quotas.assign(k, 0);

    if (total <= m) {
        // Everything is kept; spread the shortfall proportionally so the
        // replacement draws downstream mirror the bins' sizes. Largest
        // remainder, ties to the smallest bin id.
        plan.quotas.assign(bin_counts.begin(), bin_counts.end());
        const std::size_t shortfall = m - total;
        if (shortfall > 0) {
            std::size_t assigned = 0;
            std::vector<std::pair<std::size_t, std::size_t>> rema(k); // (remainder, id)
            for (std::size_t i = 0; i < k; ++i) {
                const auto prod = static_cast<unsigned __int128>(shortfall) * bin_counts[i];
                plan.quotas[i] += static_cast<std::size_t>(prod / total);
                assigned += static_cast<std::size_t>(prod / total);
                rema[i] = {static_cast<std::size_t>(prod % total), i};
            }
            std::sort(rema.begin(), rema.end(), [](const auto& a, const auto& b) {
                return a.first != b.first ? a.first > b.first : a.second < b.second;
            });
            for (std::size_t r = 0; r < shortfall - assigned; ++r)
                ++plan.quotas[rema[r].second];
        }
        return plan;
    }

    // Water filling: find the highest common level whose total stays at or
    // below m, then hand the remainder +1 each to the unsaturated bins with
    // smallest id.
    const auto filled_at = [&](std::size_t level) {
        std::size_t s = 0;
        for (const std::size_t c : bin_counts) s += std::min(c, level);
        return s;
    };
    std::size_t lo = 0, hi = max_count; // invariant: filled_at(lo) <= m
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo + 1) / 2;
        if (filled_at(mid) <= m)
            lo = mid;
        else
            hi = mid - 1;
    }
    const std::size_t level = lo;
    std::size_t used = 0;
    for (std::size_t i = 0; i < k; ++i) {
        plan.quotas[i] = std::min(bin_counts[i], level);
        used += plan.quotas[i];
    }
    // Remainder +1s go to unsaturated bins at evenly spaced positions of the
    // ascending-id order. Handing them to the lowest ids instead would pile
    // the whole sample into the nearest radial rings whenever m < K.
    const std::size_t remainder = m - used;
    if (remainder > 0) {
        std::vector<std::size_t> unsaturated;
        for (std::size_t i = 0; i < k; ++i)
            if (bin_counts[i] > level) unsaturated.push_back(i);
        const std::size_t u = unsaturated.size(); // remainder < u by construction
        for (std::size_t j = 0; j < remainder; ++j)
            ++plan.quotas[unsaturated[j * u / remainder]];
    }
    return plan;
}

namespace {

SampleResult pcb_impl(const PointCloud& cloud, const CylGridConfig& cfg, std::size_t m,
                      std::uint64_t seed, bool parallel) {
    if (cloud.empty()) throw InvalidInput("pcb_random_sample: empty input");
    if (m == 0) throw InvalidInput("pcb_random_sample: sample size must be positive");

    const auto polar = parallel ? to_polar(cloud) : to_polar_serial(cloud);
    const BinIndexing bins =
        parallel ? build_bins(std::span<const PolarPoint>(polar), cfg)
                 : build_bins_serial(std::span<const PolarPoint>(polar), cfg);

    const std::size_t k = bins.occupied_count();
    std::vector<std::size_t> counts(k);
    for (std::size_t i = 0; i < k; ++i) counts[i] = bins.bin_point_count(i);

    QuotaPlan plan = allocate_quotas(counts, m);
    plan.bin_ids.assign(bins.occupied_ids.begin(), bins.occupied_ids.end());

    std::vector<std::size_t> offsets(k + 1, 0);
    bool duplicated = false;
    for (std::size_t i = 0; i < k; ++i) {
        offsets[i + 1] = offsets[i] + plan.quotas[i];
        duplicated = duplicated || plan.quotas[i] > counts[i];
    }

    SampleResult out;
    out.method = Method::kPcbRandom;
    out.seed = seed;
    out.duplicated = duplicated;
    out.indices.resize(m);

    // Each block samples from its own (seed, bin id) stream: iteration
    // order cannot change the result.
    const auto sk = static_cast<std::ptrdiff_t>(k);
#pragma omp parallel for schedule(dynamic, 64) if (parallel && k >= 256)
    for (std::ptrdiff_t b = 0; b < sk; ++b) {
        const auto pts = bins.bin_points(b);
        RngStream rng(seed, streams::kPcbBin | plan.bin_ids[b]);
        std::vector<std::uint32_t> local(pts.begin(), pts.end());
        const std::size_t quota = plan.quotas[b];
        const std::size_t take = std::min(quota, local.size());
        shuffle_prefix(local, take, rng);
        std::uint32_t* dst = out.indices.data() + offsets[b];
        std::copy_n(local.begin(), take, dst);
        for (std::size_t e = take; e < quota; ++e)
            dst[e] = local[rng.next_below(local.size())];
    }

    RngStream final_rng(seed, streams::kPcbFinal);
    shuffle_all(out.indices, final_rng);
    return out;
}

SampleResult fps_impl(const PointCloud& cloud, std::size_t m, std::size_t start_index,
                      bool parallel) {
    const std::size_t n = cloud.size();
    if (n == 0) throw InvalidInput("farthest_point_sample: empty input");
    if (m == 0) throw InvalidInput("farthest_point_sample: sample size must be positive");
    if (m > n)
        throw InvalidInput("farthest_point_sample: sample size " + std::to_string(m) +
                           " exceeds point count " + std::to_string(n));
    if (start_index >= n)
        throw InvalidInput("farthest_point_sample: start index out of range");

    SampleResult out;
    out.method = Method::kFarthestPoint;
    out.seed = start_index;
    out.duplicated = false;
    out.indices.resize(m);
    out.indices[0] = static_cast<std::uint32_t>(start_index);

    const double* xs = cloud.x.data();
    const double* ys = cloud.y.data();
    const double* zs = cloud.z.data();

    // min_d2[i] = squared distance from point i to its nearest selected
    // point; -1 marks selected points so they can never win the argmax.
    std::vector<double> min_d2(n, std::numeric_limits<double>::infinity());
    min_d2[start_index] = -1.0;
    std::size_t last = start_index;

    const auto sn = static_cast<std::ptrdiff_t>(n);
    for (std::size_t step = 1; step < m; ++step) {
        const double lx = xs[last], ly = ys[last], lz = zs[last];
        double best = -1.0;
        std::ptrdiff_t best_i = -1;
        if (parallel && n >= 16384) {
#pragma omp parallel
            {
                double tbest = -1.0;
                std::ptrdiff_t tbest_i = -1;
#pragma omp for schedule(static) nowait
                for (std::ptrdiff_t i = 0; i < sn; ++i) {
                    double d = min_d2[i];
                    if (d < 0.0) continue;
                    const double dx = xs[i] - lx, dy = ys[i] - ly, dz = zs[i] - lz;
                    const double d2 = dx * dx + dy * dy + dz * dz;
                    if (d2 < d) min_d2[i] = d = d2;
                    if (d > tbest || (d == tbest && i < tbest_i)) {
                        tbest = d;
                        tbest_i = i;
                    }
                }
#pragma omp critical
                {
                    if (tbest > best || (tbest == best && tbest_i != -1 &&
                                         (best_i == -1 || tbest_i < best_i))) {
                        best = tbest;
                        best_i = tbest_i;
                    }
                }
            }
        } else {
            for (std::ptrdiff_t i = 0; i < sn; ++i) {
                double d = min_d2[i];
                if (d < 0.0) continue;
                const double dx = xs[i] - lx, dy = ys[i] - ly, dz = zs[i] - lz;
                const double d2 = dx * dx + dy * dy + dz * dz;
                if (d2 < d) min_d2[i] = d = d2;
                if (d > best) {
                    best = d;
                    best_i = i;
                }
            }
        }
        last = static_cast<std::size_t>(best_i);
        out.indices[step] = static_cast<std::uint32_t>(last);
        min_d2[last] = -1.0;
    }
    return out;
}

} // namespace

SampleResult pcb_random_sample(const PointCloud& cloud, const CylGridConfig& cfg,
                               std::size_t m, std::uint64_t seed) {
    return pcb_impl(cloud, cfg, m, seed, true);
}

SampleResult pcb_random_sample_serial(const PointCloud& cloud, const CylGridConfig& cfg,
                                      std::size_t m, std::uint64_t seed) {
    return pcb_impl(cloud, cfg, m, seed, false);
}

SampleResult farthest_point_sample(const PointCloud& cloud, std::size_t m,
                                   std::size_t start_index) {
    return fps_impl(cloud, m, start_index, true);
}

SampleResult farthest_point_sample_serial(const PointCloud& cloud, std::size_t m,
                                          std::size_t start_index) {
    return fps_impl(cloud, m, start_index, false);
}

} // namespace pcbs
