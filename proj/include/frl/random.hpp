#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace frl {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer. Used to derive independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Purpose tag for a derived random stream.
enum class StreamKind : std::uint64_t {
    environment = 1,
    agent = 2,
    central_init = 3,
    availability = 4,
    edge_init = 5,
};

/// seed(master, kind, id) = splitmix64(splitmix64(splitmix64(master) ^ kind) ^ id).
/// Streams depend only on (master, kind, id), so the order in which edges are
/// created or stepped has no effect on the numbers each edge sees.
constexpr std::uint64_t derive_seed(std::uint64_t master, StreamKind kind, std::uint64_t id) noexcept {
    return splitmix64(splitmix64(splitmix64(master) ^ static_cast<std::uint64_t>(kind)) ^ id);
}

inline Rng make_stream(std::uint64_t master, StreamKind kind, std::uint64_t id) {
    return Rng{derive_seed(master, kind, id)};
}

/// Uniform double in [0, 1) from the top 53 bits; unlike std::uniform_real_distribution
/// the mapping is fixed across standard libraries.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline bool bernoulli(Rng& rng, double p) {
    return uniform01(rng) < p;
}

/// Uniform integer in [0, n). Lemire-style rejection keeps it unbiased.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t v = rng();
    while (v >= limit) v = rng();
    return v % n;
}

}  // namespace frl
