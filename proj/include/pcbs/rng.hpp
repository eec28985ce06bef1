#pragma once

#include <cstdint>
#include <vector>

namespace pcbs {

/// splitmix64 finalizer. Bijective on 64-bit values.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Stream tags. Every consumer of randomness draws from (seed, stream);
/// streams never alias as long as the payload stays below 2^48.
namespace streams {
constexpr std::uint64_t kRandomSample = 0x5253ULL << 48; // "RS"
constexpr std::uint64_t kPcbBin = 0x5042ULL << 48;       // "PB" + flat bin id
constexpr std::uint64_t kPcbFinal = 0x5046ULL << 48;     // "PF"
constexpr std::uint64_t kSynthPoint = 0x5350ULL << 48;   // "SP" + point index
} // namespace streams

/// Counter-based splittable generator (splitmix64 core). Two streams with
/// the same seed but different stream ids are independent, so per-bin or
/// per-point work can run in parallel and still reproduce the sequential
/// result bit for bit.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0) noexcept
        : state_(mix64(mix64(seed + 0x9E3779B97F4A7C15ULL) ^
                       mix64(stream ^ 0x6A09E667F3BCC909ULL))) {}

    std::uint64_t next_u64() noexcept {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix64(state_);
    }

    /// Uniform in [0, 1) with 53 random bits.
    double next_double() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform in [0, bound), bound > 0. Unbiased (Lemire's method).
    std::uint64_t next_below(std::uint64_t bound) noexcept {
        unsigned __int128 m =
            static_cast<unsigned __int128>(next_u64()) * bound;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (lo < threshold) {
                m = static_cast<unsigned __int128>(next_u64()) * bound;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

private:
    std::uint64_t state_;
};

/// Forward Fisher-Yates over the first `prefix` positions. The prefix of the
/// result equals the prefix of a full shuffle driven by the same stream, so
/// shuffle-then-slice and partial shuffle are interchangeable.
template <typename T>
void shuffle_prefix(std::vector<T>& items, std::size_t prefix, RngStream& rng) {
    const std::size_t n = items.size();
    if (n < 2) return;
    const std::size_t last = prefix < n - 1 ? prefix : n - 1;
    for (std::size_t i = 0; i < last; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.next_below(n - i));
        std::swap(items[i], items[j]);
    }
}

template <typename T>
void shuffle_all(std::vector<T>& items, RngStream& rng) {
    shuffle_prefix(items, items.size(), rng);
}

} // namespace pcbs
