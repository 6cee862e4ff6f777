#pragma once

#include <cstdint>

namespace metricsig {

/// Counter-based generator: every draw is a pure function of
/// (seed, trial, arm, sample, lane), built from chained SplitMix64
/// finalisers. Draws can be evaluated in any order or on any thread and
/// still reproduce the same stream.
class CounterRng {
public:
    explicit constexpr CounterRng(std::uint64_t seed) noexcept : key_(mix(seed)) {}

    constexpr std::uint64_t bits(std::uint64_t trial, std::uint32_t arm, std::uint64_t sample,
                                 std::uint32_t lane) const noexcept {
        std::uint64_t h = mix(key_ ^ trial);
        h = mix(h ^ ((static_cast<std::uint64_t>(arm) << 32) | lane));
        return mix(h ^ sample);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    constexpr double uniform(std::uint64_t trial, std::uint32_t arm, std::uint64_t sample,
                             std::uint32_t lane) const noexcept {
        return static_cast<double>(bits(trial, arm, sample, lane) >> 11) * 0x1.0p-53;
    }

    constexpr bool bernoulli(double p, std::uint64_t trial, std::uint32_t arm, std::uint64_t sample,
                             std::uint32_t lane) const noexcept {
        return uniform(trial, arm, sample, lane) < p;
    }

    static constexpr std::uint64_t mix(std::uint64_t x) noexcept {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

private:
    std::uint64_t key_;
};

}  // namespace metricsig
