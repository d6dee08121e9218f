#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace gsim {

// Deterministic seeded random stream (splitmix64 core). Streams are forked by
// name or index so every consumer owns an independent substream of the master
// seed; results never depend on call interleaving across consumers. Forking is
// const, so per-element forks (e.g. one per pixel) are safe from any thread.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : state_(mix(seed ^ kStreamSalt)) {}

    RngStream fork(std::string_view name) const { return RngStream(state_ ^ fnv1a(name), Raw{}); }
    RngStream fork(std::uint64_t index) const { return RngStream(state_ ^ mix(index + kIndexSalt), Raw{}); }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        return mix(state_);
    }

    // uniform in [0, 1)
    double next_uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_uniform(); }

    // Standard normal via Box-Muller. The sine partner is discarded so one
    // draw always consumes exactly two uniforms.
    double next_gaussian() {
        const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
        const double u2 = next_uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    struct Raw {};
    RngStream(std::uint64_t state, Raw) : state_(mix(state)) {}

    static constexpr std::uint64_t kStreamSalt = 0x5851f42d4c957f2dull;
    static constexpr std::uint64_t kIndexSalt = 0x9e3779b97f4a7c15ull;

    // splitmix64 finalizer
    static constexpr std::uint64_t mix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ull;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
        return x ^ (x >> 31);
    }

    static constexpr std::uint64_t fnv1a(std::string_view s) {
        std::uint64_t h = 0xcbf29ce484222325ull;
        for (char c : s) {
            h ^= static_cast<unsigned char>(c);
            h *= 0x100000001b3ull;
        }
        return h;
    }

    std::uint64_t state_;
};

}  // namespace gsim
