#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

namespace dimred {

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Derives an independent child seed for a numbered stream. All per-trial and
/// per-entry randomness in the library is keyed through this so results do not
/// depend on how work is split across threads.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream_a, std::uint64_t stream_b) noexcept;

/// Maps 53 random bits to [0, 1).
constexpr double unit_interval(std::uint64_t bits) noexcept {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Standard normal variate that is a pure function of (seed, counter).
double counter_normal(std::uint64_t seed, std::uint64_t counter) noexcept;

/// Fair sign (+1 or -1) that is a pure function of (seed, counter).
double counter_sign(std::uint64_t seed, std::uint64_t counter) noexcept;

/// xoshiro256** stream generator with a Box-Muller normal sampler.
class Rng {
public:
    explicit Rng(std::uint64_t seed) noexcept;

    std::uint64_t next() noexcept;
    double uniform() noexcept;            // [0, 1)
    double uniform(double lo, double hi) noexcept;
    double normal() noexcept;
    std::size_t below(std::size_t n) noexcept;  // uniform in [0, n), n > 0

private:
    std::array<std::uint64_t, 4> s_{};
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace dimred
