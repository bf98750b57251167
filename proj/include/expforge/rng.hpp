#pragma once

#include <cstdint>

namespace expforge {

// SplitMix64 (Steele, Lea, Flood 2014). Stream seeds are derived by
// chaining the finalizer over (seed, length index, strategy index, trial),
// so each trial owns an independent stream regardless of scheduling.
// The derivation is part of the output contract: changing it changes every
// simulated CSV.
class SplitMix64 {
public:
    explicit constexpr SplitMix64(std::uint64_t state) noexcept : state_(state) {}

    constexpr std::uint64_t next() noexcept {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix(state_);
    }

    // Uniform in [0, 1) with 53 bits of precision.
    constexpr double uniform() noexcept {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

constexpr std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t length_index,
                                           std::uint64_t strategy_index,
                                           std::uint64_t trial) noexcept {
    std::uint64_t h = SplitMix64::mix(seed + 0x9E3779B97F4A7C15ULL);
    h = SplitMix64::mix(h ^ (length_index + 0x632BE59BD9B4E019ULL));
    h = SplitMix64::mix(h ^ (strategy_index + 0x8CB92BA72F3D8DD7ULL));
    h = SplitMix64::mix(h ^ (trial + 0xA0761D6478BD642FULL));
    return h;
}

}  // namespace expforge
