#include "pcbs/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <numeric>
#include <string>

#include "pcbs/errors.hpp"
#include "pcbs/rng.hpp"

namespace pcbs {

void CascadeSpec::validate() const {
    if (sizes.size() < 2) throw InvalidInput("cascade needs an input size and at least one stage");
    for (std::size_t i = 1; i < sizes.size(); ++i)
        if (!(sizes[i] < sizes[i - 1]))
            throw InvalidInput("cascade sizes must be strictly decreasing");
    if (sizes.back() == 0) throw InvalidInput("cascade sizes must be positive");
    if (repeats < 1) throw InvalidInput("cascade repeats must be >= 1");
    if (methods.empty()) throw InvalidInput("cascade needs at least one method");
}

std::string CascadeSpec::label() const {
    std::string s = "(";
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (i > 0) s += "->";
        s += std::to_string(sizes[i]);
    }
    s += ") x " + std::to_string(repeats);
    return s;
}

std::vector<CascadeSpec> table4_preset() {
    std::vector<CascadeSpec> specs;
    const std::vector<std::size_t> full = {4096, 1024, 256, 64, 16};
    for (std::size_t depth = 2; depth <= full.size(); ++depth) {
        CascadeSpec spec;
        spec.sizes.assign(full.begin(), full.begin() + static_cast<std::ptrdiff_t>(depth));
        specs.push_back(std::move(spec));
    }
    return specs;
}

namespace {

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// One full cascade pass with the serial kernels; gathers between stages so
// every stage consumes the previous stage's output cloud.
void run_cascade_once(const PointCloud& input, const CascadeSpec& spec,
                      const CylGridConfig& cfg, Method method, std::uint64_t seed) {
    const PointCloud* current = &input;
    PointCloud scratch;
    for (std::size_t stage = 1; stage < spec.sizes.size(); ++stage) {
        const std::size_t m = spec.sizes[stage];
        const std::uint64_t stage_seed = mix64(seed + stage);
        SampleResult res;
        switch (method) {
            case Method::kRandom:
                res = random_sample(current->size(), m, stage_seed);
                break;
            case Method::kPcbRandom:
                if (stage == 1 || !spec.pcb_first_only)
                    res = pcb_random_sample_serial(*current, cfg, m, stage_seed);
                else
                    res = random_sample(current->size(), m, stage_seed);
                break;
            case Method::kFarthestPoint:
                res = farthest_point_sample_serial(*current, m, 0);
                break;
        }
        scratch = gather(*current, res.indices);
        current = &scratch;
    }
}

} // namespace

CascadeTiming run_cascade(const CascadeSpec& spec, const PointCloud& source,
                          const CylGridConfig& cfg, std::uint64_t seed,
                          int harness_runs) {
    spec.validate();
    cfg.validate();
    if (harness_runs < 1) throw InvalidInput("harness_runs must be >= 1");
    if (source.size() < spec.sizes[0])
        throw InvalidInput("source cloud has " + std::to_string(source.size()) +
                           " points, cascade needs " + std::to_string(spec.sizes[0]));

    // Trim to the cascade input size outside the measured region.
    std::vector<std::uint32_t> head(spec.sizes[0]);
    std::iota(head.begin(), head.end(), 0u);
    const PointCloud input = gather(source, head);

    using clock = std::chrono::steady_clock;
    CascadeTiming result;
    result.cascade = spec.label();

    for (const Method method : spec.methods) {
        // Discarded warm-up pass.
        run_cascade_once(input, spec, cfg, method, mix64(seed));

        std::vector<double> runs;
        runs.reserve(static_cast<std::size_t>(harness_runs));
        for (int run = 0; run < harness_runs; ++run) {
            const auto t0 = clock::now();
            for (int rep = 0; rep < spec.repeats; ++rep) {
                const std::uint64_t rep_seed =
                    mix64(seed ^ (static_cast<std::uint64_t>(run) << 32 | static_cast<std::uint64_t>(rep)));
                run_cascade_once(input, spec, cfg, method, rep_seed);
            }
            const auto t1 = clock::now();
            runs.push_back(std::chrono::duration<double>(t1 - t0).count());
        }

        const double med = median(runs);
        std::vector<double> dev(runs.size());
        for (std::size_t i = 0; i < runs.size(); ++i) dev[i] = std::abs(runs[i] - med);
        const double mad = median(dev);

        MethodTiming row;
        row.method = method;
        row.seconds = med;
        row.mad_seconds = mad;
        row.unstable = mad > 0.2 * med;
        result.rows.push_back(row);
    }
    return result;
}

std::string format_timing_table(const std::vector<CascadeTiming>& results) {
    std::string out;
    char line[160];
    std::snprintf(line, sizeof(line), "%-40s %-8s %12s %12s %s\n", "cascade", "method",
                  "seconds", "mad", "stable");
    out += line;
    for (const CascadeTiming& ct : results) {
        for (const MethodTiming& row : ct.rows) {
            std::snprintf(line, sizeof(line), "%-40s %-8s %12.6f %12.6f %s\n",
                          ct.cascade.c_str(), method_name(row.method), row.seconds,
                          row.mad_seconds, row.unstable ? "no" : "yes");
            out += line;
        }
    }
    return out;
}

std::string format_timing_csv(const std::vector<CascadeTiming>& results) {
    std::string out = "cascade,method,seconds,mad_seconds,unstable\n";
    char line[160];
    for (const CascadeTiming& ct : results) {
        for (const MethodTiming& row : ct.rows) {
            std::snprintf(line, sizeof(line), "%s,%s,%.9f,%.9f,%d\n", ct.cascade.c_str(),
                          method_name(row.method), row.seconds, row.mad_seconds,
                          row.unstable ? 1 : 0);
            out += line;
        }
    }
    return out;
}

} // namespace pcbs
