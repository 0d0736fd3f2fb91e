#pragma once

#include <cstdint>

namespace m2m {

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Independent random streams. Adding an entity never shifts another entity's draws.
enum class StreamDomain : std::uint64_t {
    Position = 0x11,
    RbInitial = 0x22,
    RbTransition = 0x33,
    Observation = 0x44,
    PolicyChoice = 0x55,
    Episode = 0x66,
};

/// Counter-based generator: every draw is a pure function of
/// (seed, domain, entity, counter, lane). There is no hidden state, so
/// replaying any slot for any entity is trivial.
class CounterRng {
public:
    constexpr CounterRng(std::uint64_t seed, StreamDomain domain, std::uint64_t entity) noexcept
        : key_(mix64(mix64(seed ^ static_cast<std::uint64_t>(domain) * 0xd6e8feb86659fd93ULL) ^ entity)) {}

    constexpr std::uint64_t bits(std::uint64_t counter, std::uint64_t lane = 0) const noexcept {
        return mix64(mix64(key_ ^ counter) + lane * 0x9e3779b97f4a7c15ULL);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    constexpr double uniform(std::uint64_t counter, std::uint64_t lane = 0) const noexcept {
        return static_cast<double>(bits(counter, lane) >> 11) * 0x1.0p-53;
    }

    constexpr bool bernoulli(double p, std::uint64_t counter, std::uint64_t lane = 0) const noexcept {
        return uniform(counter, lane) < p;
    }

private:
    std::uint64_t key_;
};

}  // namespace m2m
