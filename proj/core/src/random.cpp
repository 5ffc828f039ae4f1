#include "dimred/random.hpp"

#include <cmath>
#include <numbers>

namespace dimred {

namespace {

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
}

std::uint64_t entry_hash(std::uint64_t seed, std::uint64_t counter) noexcept {
    return splitmix64(splitmix64(seed) ^ splitmix64(counter ^ 0xd1b54a32d192ed03ULL));
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    return splitmix64(splitmix64(seed ^ 0x6a09e667f3bcc909ULL) + splitmix64(stream));
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream_a, std::uint64_t stream_b) noexcept {
    return derive_seed(derive_seed(seed, stream_a), stream_b);
}

double counter_normal(std::uint64_t seed, std::uint64_t counter) noexcept {
    const std::uint64_t h1 = entry_hash(seed, 2 * counter);
    const std::uint64_t h2 = entry_hash(seed, 2 * counter + 1);
    // 1 - U lies in (0, 1], so the log is finite.
    const double u1 = 1.0 - unit_interval(h1);
    const double u2 = unit_interval(h2);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double counter_sign(std::uint64_t seed, std::uint64_t counter) noexcept {
    return (entry_hash(seed, counter) >> 63) != 0 ? 1.0 : -1.0;
}

Rng::Rng(std::uint64_t seed) noexcept {
    std::uint64_t z = seed;
    for (auto& word : s_) {
        z += 0x9e3779b97f4a7c15ULL;
        word = splitmix64(z);
    }
}

std::uint64_t Rng::next() noexcept {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Rng::uniform() noexcept { return unit_interval(next()); }

double Rng::uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

double Rng::normal() noexcept {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(angle);
    has_spare_ = true;
    return r * std::cos(angle);
}

std::size_t Rng::below(std::size_t n) noexcept {
    // Lemire's multiply-shift; the bias is < n / 2^64 and irrelevant here.
    __extension__ using u128 = unsigned __int128;
    const u128 product = static_cast<u128>(next()) * n;
    return static_cast<std::size_t>(product >> 64);
}

}  // namespace dimred
