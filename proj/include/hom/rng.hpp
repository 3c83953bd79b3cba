#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace hom {

/// xoshiro256** generator whose state is derived from (seed, stream) by
/// splitmix64, so every Monte Carlo trial owns an independent substream
/// that does not depend on how trials are scheduled across threads.
class TrialRng {
public:
    TrialRng(std::uint64_t seed, std::uint64_t stream)
    {
        std::uint64_t x = mix(seed) ^ mix(stream + 0x632be59bd9b4e019ULL);
        for (auto& word : state_) word = mix(x += kGolden);
    }

    std::uint64_t next()
    {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // [0, 1) with 53 random bits
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Box-Muller; always consumes two uniforms.
    double normal()
    {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

    static std::uint64_t mix(std::uint64_t z)
    {
        z += kGolden;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t state_[4];
};

}  // namespace hom
