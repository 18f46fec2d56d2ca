#pragma once

#include <cstdint>

namespace mecheff {

/// SplitMix64 finalizer (Steele, Lea, Flood; constants from Vigna's reference code).
constexpr std::uint64_t mix64(std::uint64_t z)
{
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Counter-based substream for one Monte Carlo trial.
///
/// The starting state is a hash of (seed, trial), so a trial sees the same
/// draws no matter which worker runs it or in what order.
class TrialStream {
public:
    TrialStream(std::uint64_t seed, std::uint64_t trial)
        : state_(mix64(mix64(seed) ^ mix64(trial + 0x632BE59BD9B4E019ULL)))
    {
    }

    std::uint64_t next()
    {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix64(state_);
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

}  // namespace mecheff
