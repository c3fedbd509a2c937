#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace seqcast {

/**
 * Deterministic seeded random generator.
 *
 * Engine is std::mt19937_64 (fully specified by the standard), doubles are
 * produced from the top 53 bits of the engine output and normals via
 * Box-Muller, so a given seed yields the same sequence on every platform.
 */
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53-bit resolution.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    /// Standard normal via Box-Muller; consumes two uniforms per pair.
    double normal(double mean = 0.0, double sd = 1.0) {
        if (has_cached_) {
            has_cached_ = false;
            return mean + sd * cached_;
        }
        // u1 in (0, 1] so the log is finite
        const double u1 =
            (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = uniform01();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * M_PI * u2;
        cached_ = radius * std::sin(angle);
        has_cached_ = true;
        return mean + sd * radius * std::cos(angle);
    }

    /// Independent child generator keyed by a label (stable across runs).
    SeededRng derive(std::string_view label) const {
        return SeededRng(splitmix64(seed_ ^ fnv1a64(label)));
    }

    static std::uint64_t fnv1a64(std::string_view text) {
        std::uint64_t hash = 0xcbf29ce484222325ull;
        for (const char ch : text) {
            hash ^= static_cast<unsigned char>(ch);
            hash *= 0x100000001b3ull;
        }
        return hash;
    }

    static std::uint64_t splitmix64(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ull;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
        return x ^ (x >> 31);
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    bool has_cached_ = false;
    double cached_ = 0.0;
};

} // namespace seqcast
