#pragma once

#include <cstdint>
#include <limits>

namespace trajsurv {

/// SplitMix64 finaliser (Steele, Lea & Flood 2014). Used for seeding.
constexpr std::uint64_t splitmix64(std::uint64_t& state)
{
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Seed of the independent sub-stream for `index` under master `seed`:
/// one SplitMix64 step from state `seed`, xor-ed with `index`, then one more
/// SplitMix64 step. Parallel generation by index reproduces serial output.
constexpr std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index)
{
    std::uint64_t s = seed;
    std::uint64_t t = splitmix64(s) ^ index;
    return splitmix64(t);
}

/// xoshiro256** 1.0 (Blackman & Vigna), state filled by four SplitMix64
/// outputs. Satisfies UniformRandomBitGenerator. Derived draws below are
/// defined bit-for-bit so other implementations can reproduce the stream;
/// std:: distributions are deliberately not used because their output is
/// implementation-defined.
class Xoshiro256 {
public:
    using result_type = std::uint64_t;

    explicit constexpr Xoshiro256(std::uint64_t seed)
    {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()()
    {
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

    /// ((x >> 11) + 0.5) * 2^-53: uniform on the open interval (0, 1).
    constexpr double uniform_open01()
    {
        return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Uniform integer in [lo, hi] by rejection on the top bits of x % span.
    constexpr std::int64_t uniform_int(std::int64_t lo, std::int64_t hi)
    {
        const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        if (span == 0) return static_cast<std::int64_t>((*this)());
        const std::uint64_t limit = max() - max() % span;
        std::uint64_t x = 0;
        do {
            x = (*this)();
        } while (x >= limit);
        return lo + static_cast<std::int64_t>(x % span);
    }

    /// Uniform real in [lo, hi) built from uniform_open01.
    constexpr double uniform_real(double lo, double hi) { return lo + (hi - lo) * uniform_open01(); }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4]{};
};

}  // namespace trajsurv
