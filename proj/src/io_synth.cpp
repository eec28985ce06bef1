#include "pcbs/io_synth.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <string>

#include "pcbs/errors.hpp"
#include "pcbs/rng.hpp"

namespace pcbs {

namespace {

std::vector<std::byte> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());
    in.seekg(0, std::ios::end);
    const auto size = static_cast<std::size_t>(in.tellg());
    in.seekg(0, std::ios::beg);
    std::vector<std::byte> bytes(size);
    if (size > 0) in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(size));
    if (!in) throw FormatError("short read from " + path.string());
    return bytes;
}

// Writes via a sibling temp file and renames into place, so a failed run
// never leaves a partial output behind.
void write_file_atomic(const std::filesystem::path& path, const void* data,
                       std::size_t size) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw FormatError("cannot open " + tmp.string() + " for writing");
        if (size > 0) out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
        if (!out) throw FormatError("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

inline float load_f32le(const std::byte* p) noexcept {
    std::uint32_t u;
    std::memcpy(&u, p, 4);
    float f;
    std::memcpy(&f, &u, 4); // host is little-endian
    return f;
}

inline std::uint32_t load_u32le(const std::byte* p) noexcept {
    std::uint32_t u;
    std::memcpy(&u, p, 4);
    return u;
}

} // namespace

PointCloud read_kitti_bin(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    constexpr std::size_t kRecord = 16; // x, y, z, intensity as f32le
    if (bytes.size() % kRecord != 0)
        throw FormatError("truncated record in " + path.string() + ": file size " +
                          std::to_string(bytes.size()) + " is not a multiple of 16 (stray bytes from offset " +
                          std::to_string(bytes.size() - bytes.size() % kRecord) + ")");

    const std::size_t n = bytes.size() / kRecord;
    PointCloud cloud;
    cloud.reserve(n);
    cloud.intensity.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::byte* rec = bytes.data() + i * kRecord;
        const float x = load_f32le(rec);
        const float y = load_f32le(rec + 4);
        const float z = load_f32le(rec + 8);
        const float intensity = load_f32le(rec + 12);
        if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z) ||
            !std::isfinite(intensity))
            throw InvalidInput("non-finite value in record " + std::to_string(i) +
                               " of " + path.string());
        cloud.push_back(x, y, z);
        cloud.intensity.push_back(intensity);
    }
    return cloud;
}

void write_kitti_bin(const std::filesystem::path& path, const PointCloud& cloud) {
    cloud.validate();
    const std::size_t n = cloud.size();
    std::vector<float> records(n * 4);
    for (std::size_t i = 0; i < n; ++i) {
        records[i * 4 + 0] = static_cast<float>(cloud.x[i]);
        records[i * 4 + 1] = static_cast<float>(cloud.y[i]);
        records[i * 4 + 2] = static_cast<float>(cloud.z[i]);
        records[i * 4 + 3] = cloud.has_intensity() ? cloud.intensity[i] : 0.0f;
    }
    write_file_atomic(path, records.data(), records.size() * sizeof(float));
}

std::vector<std::uint32_t> read_labels(const std::filesystem::path& path,
                                       std::optional<std::size_t> expected_count) {
    const auto bytes = read_file(path);
    if (bytes.size() % 4 != 0)
        throw FormatError("truncated record in " + path.string() + ": file size " +
                          std::to_string(bytes.size()) + " is not a multiple of 4");
    const std::size_t n = bytes.size() / 4;
    if (expected_count && n != *expected_count)
        throw InvalidInput("label count " + std::to_string(n) + " does not match point count " +
                           std::to_string(*expected_count));
    std::vector<std::uint32_t> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        // semantic class in the low 16 bits; instance id discarded
        labels[i] = load_u32le(bytes.data() + i * 4) & 0xFFFFu;
    }
    return labels;
}

void write_labels(const std::filesystem::path& path, std::span<const std::uint32_t> labels) {
    write_file_atomic(path, labels.data(), labels.size() * sizeof(std::uint32_t));
}

void SynthConfig::validate() const {
    if (!(rho_min > 0.0) || !std::isfinite(rho_min))
        throw InvalidInput("synth: rho_min must be positive");
    if (!(rho_max > rho_min) || !std::isfinite(rho_max))
        throw InvalidInput("synth: rho_max must exceed rho_min");
    if (!(density_exponent > 0.0) || !std::isfinite(density_exponent))
        throw InvalidInput("synth: density exponent must be positive");
    if (!(z_min < z_max) || !std::isfinite(z_min) || !std::isfinite(z_max))
        throw InvalidInput("synth: z range is empty or non-finite");
}

namespace {

// Inverse CDF of the rho^-k radial law on [a, b]. The k == 1 branch is the
// log limit of the general power form.
inline double radial_icdf(double a, double b, double k, double u) noexcept {
    if (std::abs(k - 1.0) < 1e-9) return a * std::exp(u * std::log(b / a));
    const double e = 1.0 - k;
    const double ae = std::pow(a, e), be = std::pow(b, e);
    return std::pow(ae + u * (be - ae), 1.0 / e);
}

PointCloud generate_impl(const SynthConfig& cfg, bool parallel) {
    cfg.validate();
    const std::size_t n = cfg.n_points;
    PointCloud cloud;
    cloud.x.resize(n);
    cloud.y.resize(n);
    cloud.z.resize(n);
    if (cfg.with_intensity) cloud.intensity.resize(n);

    const auto sn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static) if (parallel && n >= 32768)
    for (std::ptrdiff_t i = 0; i < sn; ++i) {
        RngStream rng(cfg.seed, streams::kSynthPoint | static_cast<std::uint64_t>(i));
        const double rho = radial_icdf(cfg.rho_min, cfg.rho_max, cfg.density_exponent,
                                       rng.next_double());
        const double theta = -std::numbers::pi + rng.next_double() * 2.0 * std::numbers::pi;
        const double z = cfg.z_min + rng.next_double() * (cfg.z_max - cfg.z_min);
        cloud.x[i] = rho * std::cos(theta);
        cloud.y[i] = rho * std::sin(theta);
        cloud.z[i] = z;
        if (cfg.with_intensity)
            cloud.intensity[i] = static_cast<float>(rng.next_double());
    }
    return cloud;
}

} // namespace

PointCloud generate_long_tail(const SynthConfig& cfg) { return generate_impl(cfg, true); }

PointCloud generate_long_tail_serial(const SynthConfig& cfg) {
    return generate_impl(cfg, false);
}

double long_tail_cdf(const SynthConfig& cfg, double r) {
    cfg.validate();
    if (r <= cfg.rho_min) return 0.0;
    if (r >= cfg.rho_max) return 1.0;
    const double a = cfg.rho_min, b = cfg.rho_max, k = cfg.density_exponent;
    if (std::abs(k - 1.0) < 1e-9) return std::log(r / a) / std::log(b / a);
    const double e = 1.0 - k;
    return (std::pow(r, e) - std::pow(a, e)) / (std::pow(b, e) - std::pow(a, e));
}

std::uint64_t fnv1a64(std::span<const std::byte> bytes) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (const std::byte b : bytes) {
        h ^= static_cast<std::uint64_t>(b);
        h *= 0x100000001B3ULL;
    }
    return h;
}

std::uint64_t fnv1a64_file(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    return fnv1a64(bytes);
}

} // namespace pcbs
