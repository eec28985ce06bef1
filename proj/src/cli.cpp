#include "pcbs/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "pcbs/bench.hpp"
#include "pcbs/errors.hpp"
#include "pcbs/geometry.hpp"
#include "pcbs/grid.hpp"
#include "pcbs/io_synth.hpp"
#include "pcbs/losses.hpp"
#include "pcbs/rng.hpp"
#include "pcbs/sampling.hpp"
#include "pcbs/stats.hpp"

namespace pcbs::cli {

namespace {

using nlohmann::json;

// Exit codes per the interface contract.
constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kDataError = 2;
constexpr int kCheckFailure = 3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GridFlags {
    std::string grid = "64x64x16";
    double rho_min = 3.0;
    std::string rho_max = "max";
    double z_min = -3.0;
    double z_max = 1.5;
    bool drop_out_of_range = false;

    CylGridConfig to_config() const {
        CylGridConfig cfg;
        if (std::sscanf(grid.c_str(), "%dx%dx%d", &cfg.n_radial, &cfg.n_angular,
                        &cfg.n_height) != 3)
            throw UsageError("bad --grid '" + grid + "', expected RxPxZ like 64x64x16");
        cfg.rho_min = rho_min;
        if (rho_max == "max") {
            cfg.rho_max.reset();
        } else {
            try {
                cfg.rho_max = std::stod(rho_max);
            } catch (const std::exception&) {
                throw UsageError("bad --rho-max '" + rho_max + "', expected a number or 'max'");
            }
        }
        cfg.z_min = z_min;
        cfg.z_max = z_max;
        cfg.drop_out_of_range = drop_out_of_range;
        cfg.validate();
        return cfg;
    }

    json to_json() const {
        const CylGridConfig cfg = to_config();
        json j;
        j["n_radial"] = cfg.n_radial;
        j["n_angular"] = cfg.n_angular;
        j["n_height"] = cfg.n_height;
        j["rho_min"] = cfg.rho_min;
        if (cfg.rho_max)
            j["rho_max"] = *cfg.rho_max;
        else
            j["rho_max"] = "max";
        j["z_min"] = cfg.z_min;
        j["z_max"] = cfg.z_max;
        j["drop_out_of_range"] = cfg.drop_out_of_range;
        return j;
    }
};

void add_grid_flags(CLI::App* cmd, GridFlags& g) {
    cmd->add_option("--grid", g.grid, "Cylindrical resolution RxPxZ")
        ->capture_default_str();
    cmd->add_option("--rho-min,--rho_min", g.rho_min, "Crop range: minimum radius [m]")
        ->capture_default_str();
    cmd->add_option("--rho-max,--rho_max", g.rho_max,
                    "Crop range: maximum radius [m] or 'max' for the cloud maximum")
        ->capture_default_str();
    cmd->add_option("--z-min,--z_min", g.z_min, "Crop range: minimum height [m]")
        ->capture_default_str();
    cmd->add_option("--z-max,--z_max", g.z_max, "Crop range: maximum height [m]")
        ->capture_default_str();
    cmd->add_flag("--drop-out-of-range", g.drop_out_of_range,
                  "Leave out-of-range points unbinned instead of clamping");
}

// "n=100000,k=2,rho=3:80,z=-3:1.5" with every key optional.
SynthConfig parse_synth_spec(const std::string& spec, std::uint64_t seed) {
    SynthConfig cfg;
    cfg.seed = seed;
    if (spec.empty()) return cfg;
    std::stringstream ss(spec);
    std::string item;
    const auto parse_range = [](const std::string& v, double& lo, double& hi,
                                const std::string& key) {
        if (std::sscanf(v.c_str(), "%lf:%lf", &lo, &hi) != 2)
            throw UsageError("bad synth range '" + key + "=" + v + "', expected lo:hi");
    };
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw UsageError("bad synth entry '" + item + "', expected key=value");
        const std::string key = item.substr(0, eq);
        const std::string value = item.substr(eq + 1);
        try {
            if (key == "n")
                cfg.n_points = std::stoull(value);
            else if (key == "k")
                cfg.density_exponent = std::stod(value);
            else if (key == "rho")
                parse_range(value, cfg.rho_min, cfg.rho_max, key);
            else if (key == "z")
                parse_range(value, cfg.z_min, cfg.z_max, key);
            else
                throw UsageError("unknown synth key '" + key + "' (n, k, rho, z)");
        } catch (const UsageError&) {
            throw;
        } catch (const std::exception&) {
            throw UsageError("bad synth value '" + item + "'");
        }
    }
    return cfg;
}

std::string synth_digest_string(const SynthConfig& cfg) {
    char buf[192];
    std::snprintf(buf, sizeof(buf), "n=%zu;rho=%.17g:%.17g;z=%.17g:%.17g;k=%.17g;seed=%llu",
                  cfg.n_points, cfg.rho_min, cfg.rho_max, cfg.z_min, cfg.z_max,
                  cfg.density_exponent, static_cast<unsigned long long>(cfg.seed));
    return buf;
}

std::string digest_hex(std::uint64_t digest) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx", static_cast<unsigned long long>(digest));
    return buf;
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
    if (flag) return *flag;
    std::random_device rd;
    const std::uint64_t seed =
        (static_cast<std::uint64_t>(rd()) << 32) | static_cast<std::uint64_t>(rd());
    std::cerr << "seed: " << seed << " (chosen at random; pass --seed to reproduce)\n";
    return seed;
}

struct LoadedInput {
    PointCloud cloud;
    json provenance; // kind, path/spec, digest
};

LoadedInput load_input(const std::optional<std::string>& in_path,
                       const std::optional<std::string>& synth_spec,
                       const std::optional<std::string>& labels_path,
                       std::uint64_t seed) {
    if (in_path.has_value() == synth_spec.has_value())
        throw UsageError("exactly one of --in and --synth is required");

    LoadedInput li;
    if (in_path) {
        li.cloud = read_kitti_bin(*in_path);
        if (labels_path)
            li.cloud.labels = read_labels(*labels_path, li.cloud.size());
        li.provenance["kind"] = "file";
        li.provenance["path"] = *in_path;
        li.provenance["digest"] = digest_hex(fnv1a64_file(*in_path));
        if (labels_path) {
            li.provenance["labels_path"] = *labels_path;
            li.provenance["labels_digest"] = digest_hex(fnv1a64_file(*labels_path));
        }
    } else {
        if (labels_path) throw UsageError("--labels requires --in");
        const SynthConfig cfg = parse_synth_spec(*synth_spec, seed);
        li.cloud = generate_long_tail(cfg);
        const std::string canon = synth_digest_string(cfg);
        li.provenance["kind"] = "synth";
        li.provenance["spec"] = canon;
        li.provenance["digest"] =
            digest_hex(fnv1a64(std::as_bytes(std::span(canon.data(), canon.size()))));
    }
    return li;
}

std::size_t resolve_m(const std::optional<std::size_t>& m_flag,
                      const std::optional<double>& ratio_flag, std::size_t n) {
    if (m_flag.has_value() == ratio_flag.has_value())
        throw UsageError("exactly one of --m and --ratio is required");
    if (m_flag) return *m_flag;
    if (!(*ratio_flag > 0.0) || *ratio_flag > 1.0)
        throw UsageError("--ratio must lie in (0, 1]");
    const auto m = static_cast<std::size_t>(
        std::llround(*ratio_flag * static_cast<double>(n)));
    return m == 0 ? 1 : m;
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw FormatError("cannot open " + tmp.string() + " for writing");
        out << text;
        if (!out) throw FormatError("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

void emit(const std::optional<std::string>& out_path, const std::string& text) {
    if (out_path)
        write_text_atomic(*out_path, text);
    else
        std::cout << text;
}

std::string band_hi_str(const RangeHistogram& h, std::size_t b) {
    const double hi = h.band_hi(b);
    if (std::isinf(hi)) return "inf";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", hi);
    return buf;
}

json histogram_json(const RangeHistogram& h) {
    json bands = json::array();
    for (std::size_t b = 0; b < h.bands(); ++b) {
        json row;
        row["band_lo_m"] = h.edges[b];
        const double hi = h.band_hi(b);
        if (std::isinf(hi))
            row["band_hi_m"] = nullptr; // open-ended last band
        else
            row["band_hi_m"] = hi;
        row["count"] = h.counts[b];
        row["fraction"] = h.fractions[b];
        bands.push_back(row);
    }
    return bands;
}

std::string histogram_csv(const RangeHistogram& h) {
    std::string out = "band_lo_m,band_hi_m,count,fraction\n";
    char line[128];
    for (std::size_t b = 0; b < h.bands(); ++b) {
        std::snprintf(line, sizeof(line), "%.9g,%s,%zu,%.9g\n", h.edges[b],
                      band_hi_str(h, b).c_str(), h.counts[b], h.fractions[b]);
        out += line;
    }
    return out;
}

// ---------------------------------------------------------------- sample --

struct SampleArgs {
    std::optional<std::string> in_path, synth_spec, labels_path;
    std::string method;
    std::optional<std::size_t> m_flag;
    std::optional<double> ratio_flag;
    std::optional<std::uint64_t> seed_flag;
    std::uint64_t fps_start = 0;
    GridFlags grid;
    std::string out_path;
};

int run_sample(const SampleArgs& a) {
    const std::uint64_t seed = resolve_seed(a.seed_flag);
    const Method method = method_from_name(a.method);
    LoadedInput in = load_input(a.in_path, a.synth_spec, a.labels_path, seed);
    const std::size_t n = in.cloud.size();
    if (n == 0) throw InvalidInput("input cloud is empty");
    const std::size_t m = resolve_m(a.m_flag, a.ratio_flag, n);
    const CylGridConfig grid_cfg = a.grid.to_config();

    SampleResult result;
    switch (method) {
        case Method::kRandom: result = random_sample(n, m, seed); break;
        case Method::kPcbRandom: result = pcb_random_sample(in.cloud, grid_cfg, m, seed); break;
        case Method::kFarthestPoint:
            result = farthest_point_sample(in.cloud, m, a.fps_start);
            break;
    }
    const PointCloud sampled = gather(in.cloud, result.indices);

    // Output paths: <base>.bin, <base>.label, <base>.json
    std::filesystem::path bin_path(a.out_path);
    if (bin_path.extension() != ".bin") bin_path += ".bin";
    std::filesystem::path base = bin_path;
    base.replace_extension();
    write_kitti_bin(bin_path, sampled);
    if (sampled.has_labels()) {
        std::filesystem::path label_path = base;
        label_path += ".label";
        write_labels(label_path, sampled.labels);
    }

    json side;
    side["subcommand"] = "sample";
    side["method"] = method_name(method);
    side["seed"] = result.seed;
    if (method == Method::kFarthestPoint) side["fps_start"] = a.fps_start;
    side["m"] = m;
    if (a.ratio_flag) side["ratio"] = *a.ratio_flag;
    side["grid"] = a.grid.to_json();
    side["input"] = in.provenance;
    side["points_out"] = sampled.size();
    side["duplicated"] = result.duplicated;
    side["has_labels"] = sampled.has_labels();
    std::filesystem::path side_path = base;
    side_path += ".json";
    write_text_atomic(side_path, side.dump(2) + "\n");

    std::cerr << "wrote " << sampled.size() << " points to " << bin_path.string() << "\n";
    return kOk;
}

// ----------------------------------------------------------------- stats --

struct StatsArgs {
    std::optional<std::string> in_path, synth_spec, labels_path;
    std::vector<double> edges = default_band_edges();
    bool compare = false;
    std::optional<std::size_t> m_flag;
    std::optional<double> ratio_flag;
    std::size_t n_seeds = 20;
    std::optional<std::uint64_t> seed_flag;
    GridFlags grid;
    std::string format = "csv";
    std::optional<std::string> out_path;
};

int run_stats(const StatsArgs& a) {
    if (a.format != "csv" && a.format != "json")
        throw UsageError("--format must be csv or json");
    const std::uint64_t seed = resolve_seed(a.seed_flag);
    LoadedInput in = load_input(a.in_path, a.synth_spec, a.labels_path, seed);
    if (in.cloud.empty()) throw InvalidInput("input cloud is empty");

    const RangeHistogram source = distance_histogram(in.cloud, a.edges);

    if (!a.compare) {
        if (a.format == "csv") {
            emit(a.out_path, histogram_csv(source));
        } else {
            json j;
            j["bands"] = histogram_json(source);
            j["input"] = in.provenance;
            emit(a.out_path, j.dump(2) + "\n");
        }
        return kOk;
    }

    const std::size_t n = in.cloud.size();
    std::size_t m;
    if (!a.m_flag && !a.ratio_flag)
        m = resolve_m(std::nullopt, 0.25, n); // mirror the paper's 1/4 panel
    else
        m = resolve_m(a.m_flag, a.ratio_flag, n);
    if (a.n_seeds == 0) throw UsageError("--seeds must be >= 1");

    const CylGridConfig cfg = a.grid.to_config();
    std::vector<std::uint64_t> seeds(a.n_seeds);
    for (std::size_t i = 0; i < a.n_seeds; ++i) seeds[i] = mix64(seed + i);

    const auto [rs_rep, pcb_rep] = compare_methods(in.cloud, cfg, m, seeds, a.edges);

    // Source bin uniformity for context.
    const BinIndexing bins = build_bins(in.cloud, cfg);
    std::vector<std::size_t> bin_counts(bins.occupied_count());
    for (std::size_t k = 0; k < bin_counts.size(); ++k)
        bin_counts[k] = bins.bin_point_count(k);
    const double source_cv = coefficient_of_variation(bin_counts);

    if (a.format == "csv") {
        std::string out = "method,band_lo_m,band_hi_m,count,fraction,cv_bins\n";
        char line[160];
        const auto rows = [&](const char* name, const RangeHistogram& h, double cv) {
            for (std::size_t b = 0; b < h.bands(); ++b) {
                std::snprintf(line, sizeof(line), "%s,%.9g,%s,%zu,%.9g,%.9g\n", name,
                              h.edges[b], band_hi_str(h, b).c_str(), h.counts[b],
                              h.fractions[b], cv);
                out += line;
            }
        };
        rows("source", source, source_cv);
        rows("rs", rs_rep.per_band, rs_rep.cv_bins);
        rows("pcb-rs", pcb_rep.per_band, pcb_rep.cv_bins);
        emit(a.out_path, out);
    } else {
        json j;
        j["m"] = m;
        j["seeds"] = a.n_seeds;
        j["base_seed"] = seed;
        j["input"] = in.provenance;
        j["source"] = {{"bands", histogram_json(source)}, {"cv_bins", source_cv}};
        j["rs"] = {{"bands", histogram_json(rs_rep.per_band)}, {"cv_bins", rs_rep.cv_bins}};
        j["pcb-rs"] =
            {{"bands", histogram_json(pcb_rep.per_band)}, {"cv_bins", pcb_rep.cv_bins}};
        emit(a.out_path, j.dump(2) + "\n");
    }
    return kOk;
}

// ----------------------------------------------------------------- bench --

struct BenchArgs {
    std::string preset;
    std::vector<std::size_t> sizes;
    int repeats = 11;
    std::vector<std::string> methods = {"rs", "pcb-rs", "fps"};
    bool pcb_all_stages = false;
    int harness_runs = 5;
    std::optional<std::string> in_path, synth_spec;
    std::optional<std::uint64_t> seed_flag;
    GridFlags grid;
    std::optional<std::string> out_path;
};

int run_bench(const BenchArgs& a) {
    std::vector<CascadeSpec> specs;
    if (!a.preset.empty()) {
        if (a.preset != "table4")
            throw UsageError("unknown preset '" + a.preset + "' (only: table4)");
        if (!a.sizes.empty()) throw UsageError("--preset and --sizes are mutually exclusive");
        specs = table4_preset();
    } else {
        if (a.sizes.empty()) throw UsageError("either --preset table4 or --sizes is required");
        CascadeSpec spec;
        spec.sizes = a.sizes;
        specs.push_back(std::move(spec));
    }

    std::vector<Method> methods;
    for (const std::string& name : a.methods) methods.push_back(method_from_name(name));
    for (CascadeSpec& spec : specs) {
        spec.methods = methods;
        spec.repeats = a.repeats;
        spec.pcb_first_only = !a.pcb_all_stages;
        spec.validate();
    }

    const std::uint64_t seed = resolve_seed(a.seed_flag);
    const std::size_t need = specs.front().sizes[0];

    PointCloud source;
    if (a.in_path) {
        source = read_kitti_bin(*a.in_path);
    } else {
        std::string spec_str = a.synth_spec.value_or("n=" + std::to_string(need));
        source = generate_long_tail(parse_synth_spec(spec_str, seed));
    }

    const CylGridConfig cfg = a.grid.to_config();
    std::vector<CascadeTiming> results;
    for (const CascadeSpec& spec : specs)
        results.push_back(run_cascade(spec, source, cfg, seed, a.harness_runs));

    std::cout << format_timing_table(results);
    for (const CascadeTiming& ct : results)
        for (const MethodTiming& row : ct.rows)
            if (row.unstable)
                std::cerr << "warning: unstable timing for " << method_name(row.method)
                          << " at " << ct.cascade << " (mad " << row.mad_seconds << " s)\n";
    if (a.out_path) write_text_atomic(*a.out_path, format_timing_csv(results));
    return kOk;
}

// ------------------------------------------------------------ loss-check --

struct LossCheckArgs {
    std::size_t trials = 100;
    std::uint64_t seed = 0;
};

struct GradCheck {
    std::string name;
    double max_rel_err = 0.0;
    std::size_t checked = 0;
    bool pass = true;
};

double rel_err(double a, double b) {
    return std::abs(a - b) / std::max(1.0, std::abs(a) + std::abs(b));
}

int run_loss_check(const LossCheckArgs& a) {
    constexpr double kStep = 1e-6;
    constexpr double kTol = 1e-4;
    constexpr double kExactTol = 1e-12;
    bool all_pass = true;

    // Closed-form anchor values.
    struct Exact {
        std::string name;
        double got, want;
    };
    std::vector<Exact> exacts;
    {
        const ClassWeights w21{{2.0, 1.0}};
        exacts.push_back({"wce one-hot match = 0",
                          weighted_ce({{1.0, 1e-300}}, ClassTarget::of(0, 2),
                                      ClassWeights::uniform(2))
                              .value,
                          0.0});
        exacts.push_back({"wce half/half w=(2,1) = 2 ln 2",
                          weighted_ce({{0.5, 0.5}}, ClassTarget::of(0, 2), w21).value,
                          2.0 * std::log(2.0)});
        exacts.push_back({"scl identical = 0",
                          sampling_consistency({{0.3, 0.7}}, {{0.3, 0.7}}).value, 0.0});
        exacts.push_back({"scl disjoint = 2",
                          sampling_consistency({{1.0, 1e-300}}, {{1e-300, 1.0}}).value, 2.0});
        exacts.push_back({"scl example = 0.4",
                          sampling_consistency({{0.7, 0.2, 0.1}}, {{0.5, 0.3, 0.2}}).value,
                          0.4});
        exacts.push_back({"fixed alpha=10: 1 + 10*0.2 = 3", total_fixed(1.0, 0.2, 10.0), 3.0});
        exacts.push_back({"fixed alpha=15: 1 + 15*0.2 = 4", total_fixed(1.0, 0.2, 15.0), 4.0});
        exacts.push_back({"uncertainty zero losses = 2 log 2",
                          total_uncertainty(0.0, 0.0, {1.0, 1.0}).value, 2.0 * std::log(2.0)});
        exacts.push_back({"uncertainty (1, 0.5) = 1.5 + 2 log 2",
                          total_uncertainty(1.0, 0.5, {1.0, 1.0}).value,
                          1.5 + 2.0 * std::log(2.0)});
    }

    std::printf("closed-form checks (tolerance %.0e):\n", kExactTol);
    for (const Exact& e : exacts) {
        const bool ok = std::abs(e.got - e.want) <= kExactTol;
        all_pass = all_pass && ok;
        std::printf("  %-40s got %.15g  want %.15g  [%s]\n", e.name.c_str(), e.got, e.want,
                    ok ? "ok" : "FAIL");
    }

    // Finite-difference gradient checks on random draws.
    RngStream rng(a.seed, 0xFD);
    const auto random_distribution = [&](std::size_t c) {
        ClassDistribution d;
        d.probs.resize(c);
        double sum = 0.0;
        for (double& p : d.probs) {
            p = 0.01 + rng.next_double();
            sum += p;
        }
        for (double& p : d.probs) p /= sum;
        return d;
    };

    std::vector<GradCheck> checks;
    {
        GradCheck ck{.name = "weighted_ce d/d p_c"};
        for (std::size_t t = 0; t < a.trials; ++t) {
            const std::size_t c = 2 + rng.next_below(8);
            ClassDistribution pred = random_distribution(c);
            const auto target = ClassTarget::of(rng.next_below(c), c);
            ClassWeights w;
            w.w.resize(c);
            for (double& v : w.w) v = 0.1 + 4.0 * rng.next_double();
            const ValueGrad got = weighted_ce(pred, target, w);
            for (std::size_t i = 0; i < c; ++i) {
                ClassDistribution hi = pred, lo = pred;
                hi.probs[i] += kStep;
                lo.probs[i] -= kStep;
                const double fd = (weighted_ce(hi, target, w).value -
                                   weighted_ce(lo, target, w).value) /
                                  (2.0 * kStep);
                ck.max_rel_err = std::max(ck.max_rel_err, rel_err(got.grad[i], fd));
                ++ck.checked;
            }
        }
        ck.pass = ck.max_rel_err < kTol;
        checks.push_back(ck);
    }
    {
        GradCheck ck{.name = "sampling_consistency d/d p_c"};
        for (std::size_t t = 0; t < a.trials; ++t) {
            const std::size_t c = 2 + rng.next_below(8);
            ClassDistribution pa = random_distribution(c), pb = random_distribution(c);
            const SclResult got = sampling_consistency(pa, pb);
            for (std::size_t i = 0; i < c; ++i) {
                if (std::abs(pa.probs[i] - pb.probs[i]) < 1e-6) continue; // kink-adjacent
                ClassDistribution hi = pa, lo = pa;
                hi.probs[i] += kStep;
                lo.probs[i] -= kStep;
                const double fd = (sampling_consistency(hi, pb).value -
                                   sampling_consistency(lo, pb).value) /
                                  (2.0 * kStep);
                ck.max_rel_err = std::max(ck.max_rel_err, rel_err(got.grad_pcb[i], fd));
                ++ck.checked;
            }
        }
        ck.pass = ck.max_rel_err < kTol;
        checks.push_back(ck);
    }
    {
        GradCheck ck{.name = "total_uncertainty d/d sigma"};
        for (std::size_t t = 0; t < a.trials; ++t) {
            const double lw = 2.0 * rng.next_double();
            const double ls = 2.0 * rng.next_double();
            UncertaintyParams p{0.1 + 9.9 * rng.next_double(), 0.1 + 9.9 * rng.next_double()};
            const UncertaintyResult got = total_uncertainty(lw, ls, p);
            const auto fd_sigma = [&](bool first) {
                UncertaintyParams hi = p, lo = p;
                (first ? hi.sigma1 : hi.sigma2) += kStep;
                (first ? lo.sigma1 : lo.sigma2) -= kStep;
                return (total_uncertainty(lw, ls, hi).value -
                        total_uncertainty(lw, ls, lo).value) /
                       (2.0 * kStep);
            };
            ck.max_rel_err = std::max(ck.max_rel_err, rel_err(got.d_sigma1, fd_sigma(true)));
            ck.max_rel_err = std::max(ck.max_rel_err, rel_err(got.d_sigma2, fd_sigma(false)));
            ck.checked += 2;
        }
        ck.pass = ck.max_rel_err < kTol;
        checks.push_back(ck);
    }

    std::printf("gradient checks (step %.0e, %zu trials, tolerance %.0e):\n", kStep,
                a.trials, kTol);
    for (const GradCheck& ck : checks) {
        all_pass = all_pass && ck.pass;
        std::printf("  %-40s %zu derivatives, max rel err %.3e  [%s]\n", ck.name.c_str(),
                    ck.checked, ck.max_rel_err, ck.pass ? "ok" : "FAIL");
    }

    // A sample report so the numbers are visible in one place.
    const ClassDistribution p_pcb{{0.7, 0.2, 0.1}};
    const ClassDistribution p_rs{{0.5, 0.3, 0.2}};
    const LossReport rep = total_report(p_pcb, p_rs, ClassTarget::of(0, 3),
                                        ClassWeights::uniform(3), {1.0, 1.0});
    std::printf("example report (p_pcb=[0.7,0.2,0.1], p_rs=[0.5,0.3,0.2], target=0):\n");
    std::printf("  l_wce   = %.9g\n  l_scl   = %.9g\n  l_total = %.9g\n", rep.l_wce,
                rep.l_scl, rep.l_total);
    std::printf("  d/d sigma1 = %.9g, d/d sigma2 = %.9g\n", rep.d_sigma1, rep.d_sigma2);

    std::printf("%s\n", all_pass ? "all loss checks passed" : "LOSS CHECKS FAILED");
    return all_pass ? kOk : kCheckFailure;
}

} // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"Point-cloud downsampling toolkit: polar cylinder balanced random "
                 "sampling, baselines, statistics, and timing harness"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Read options from an INI/TOML config file");

    int threads = 0;
    app.add_option("--threads", threads,
                   "OpenMP thread count for parallel (non-measured) workloads");

    SampleArgs sa;
    CLI::App* sample = app.add_subcommand("sample", "Downsample a cloud to m points");
    sample->add_option("--in", sa.in_path, "Input .bin scan");
    sample->add_option("--synth", sa.synth_spec,
                       "Synthetic long-tail cloud spec: n=..,k=..,rho=lo:hi,z=lo:hi")
        ->expected(0, 1)
        ->default_str("");
    sample->add_option("--labels", sa.labels_path, "Input .label file paired with --in");
    sample->add_option("--method", sa.method, "rs | pcb-rs | fps")->required();
    sample->add_option("--m", sa.m_flag, "Number of points to keep");
    sample->add_option("--ratio", sa.ratio_flag, "Keep-ratio in (0, 1]; m = round(ratio*N)");
    sample->add_option("--seed", sa.seed_flag, "RNG seed (random and printed when absent)");
    sample->add_option("--fps-start", sa.fps_start, "Start index for fps")
        ->capture_default_str();
    add_grid_flags(sample, sa.grid);
    sample->add_option("--out", sa.out_path, "Output path; writes .bin, .label, .json")
        ->required();

    StatsArgs ta;
    CLI::App* stats = app.add_subcommand("stats", "Distance distribution and uniformity");
    stats->add_option("--in", ta.in_path, "Input .bin scan");
    stats->add_option("--synth", ta.synth_spec, "Synthetic cloud spec (see sample)")
        ->expected(0, 1)
        ->default_str("");
    stats->add_option("--labels", ta.labels_path, "Input .label file paired with --in");
    stats->add_option("--edges", ta.edges, "Band edges in meters (comma separated)")
        ->delimiter(',')
        ->capture_default_str();
    stats->add_flag("--compare", ta.compare, "Compare rs vs pcb-rs uniformity");
    stats->add_option("--m", ta.m_flag, "Sample size for --compare");
    stats->add_option("--ratio", ta.ratio_flag, "Keep-ratio for --compare (default 0.25)");
    stats->add_option("--seeds", ta.n_seeds, "Number of seeds for --compare")
        ->capture_default_str();
    stats->add_option("--seed", ta.seed_flag, "Base RNG seed");
    add_grid_flags(stats, ta.grid);
    stats->add_option("--format", ta.format, "csv | json")->capture_default_str();
    stats->add_option("--out", ta.out_path, "Output file (stdout when absent)");

    BenchArgs ba;
    CLI::App* bench = app.add_subcommand("bench", "Wall-clock sampling comparison");
    bench->add_option("--preset", ba.preset, "Cascade preset: table4");
    bench->add_option("--sizes", ba.sizes, "Custom cascade sizes, e.g. 4096,1024,256")
        ->delimiter(',');
    bench->add_option("--repeats", ba.repeats, "Cascade executions per measurement")
        ->capture_default_str();
    bench->add_option("--methods", ba.methods, "Methods to time (comma separated)")
        ->delimiter(',')
        ->capture_default_str();
    bench->add_flag("--pcb-all-stages", ba.pcb_all_stages,
                    "Apply pcb-rs to every stage instead of the first only");
    bench->add_option("--harness-runs", ba.harness_runs,
                      "Measurements per method (median reported)")
        ->capture_default_str();
    bench->add_option("--in", ba.in_path, "Source cloud .bin (synthetic when absent)");
    bench->add_option("--synth", ba.synth_spec, "Synthetic source spec (see sample)");
    bench->add_option("--seed", ba.seed_flag, "RNG seed");
    add_grid_flags(bench, ba.grid);
    bench->add_option("--out", ba.out_path, "Also write CSV to this path");

    LossCheckArgs la;
    CLI::App* loss = app.add_subcommand("loss-check", "Verify loss values and gradients");
    loss->add_option("--trials", la.trials, "Random draws per gradient check")
        ->capture_default_str();
    loss->add_option("--seed", la.seed, "RNG seed for the random draws")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#endif

    try {
        if (sample->parsed()) return run_sample(sa);
        if (stats->parsed()) return run_stats(ta);
        if (bench->parsed()) return run_bench(ba);
        if (loss->parsed()) return run_loss_check(la);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDataError;
    } catch (const InvalidInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDataError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDataError;
    }
    return kUsage;
}

} // namespace pcbs::cli
