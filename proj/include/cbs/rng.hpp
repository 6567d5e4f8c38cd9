#pragma once
// Reproducible random streams: xoshiro256++ seeded by a splitmix64 avalanche
// of (seed, stream_index). Identical (seed, index) pairs always produce the
// same sequence; Monte Carlo sample i uses stream index i, which makes every
// estimate independent of how samples are partitioned across workers.

#include <cmath>
#include <cstdint>

namespace cbs {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}
}  // namespace detail

class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_index) {
        // Avalanche the (seed, index) pair so neighboring indices yield
        // unrelated states; two mix rounds per word, all four words seeded.
        std::uint64_t sm = seed;
        (void)detail::splitmix64(sm);
        sm ^= 0xa3ec647659359acdULL * stream_index + detail::splitmix64(sm);
        for (auto& word : state_) word = detail::splitmix64(sm);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = detail::rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = detail::rotl(state_[3], 45);
        return result;
    }

    /// Uniform on (0, 1]: never returns 0, so -log(u) is always finite.
    double uniform01() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    /// Uniform on [0, 1).
    double uniform_halfopen() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Exponential(rate) by inverse CDF: -log(U)/rate with U in (0,1].
    double exponential(double rate) { return -std::log(uniform01()) / rate; }

    /// Fair coin.
    bool coin() { return (next_u64() >> 63) != 0; }

private:
    std::uint64_t state_[4];
};

}  // namespace cbs
