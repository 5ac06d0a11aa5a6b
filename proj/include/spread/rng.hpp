#pragma once

#include <cstdint>
#include <random>

namespace spread {

/// Name of the pinned generator scheme; bump the suffix if the derivation of
/// per-trial streams ever changes.
inline constexpr const char* rng_algorithm = "mt19937_64+splitmix64-v1";

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of trial i under a master seed.
inline std::uint64_t trial_seed(std::uint64_t master, std::uint64_t trial) {
    return splitmix64(master ^ splitmix64(trial));
}

/// mt19937_64 with a platform-independent uniform draw (the standard
/// distributions are implementation defined).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}
    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    std::uint64_t next() { return eng_(); }

private:
    std::mt19937_64 eng_;
};

} // namespace spread
