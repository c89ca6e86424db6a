#pragma once

// Deterministic counter-based random number generation.
//
// SeededRng is a SplitMix64-style generator run in counter mode: draw k of
// stream (seed, stream) is finalize(base + (k+1) * GOLDEN), where base mixes
// the seed and stream id. Any (seed, stream, draw-index) triple maps to one
// fixed value, so trials can be generated independently and in any order and
// still reproduce bit-identically.
//
// Simulation code keys streams as (trial, channel, purpose) via make_stream;
// purposes keep the noise frame, signal frame, fading draw, and attacker
// draws of one trial statistically independent of each other.

#include <cstdint>

#include "specsense/special_functions.hpp"

namespace specsense {

// Stream-id layout: (trial << 24) | (channel << 8) | purpose.
enum class StreamPurpose : std::uint64_t {
    NoiseFrame = 0,
    SignalFrame = 1,
    FadingSnr = 2,
    AttackerLies = 3,
};

inline std::uint64_t make_stream(std::uint64_t trial, std::uint64_t channel,
                                 StreamPurpose purpose) {
    return (trial << 24) | ((channel & 0xffff) << 8) |
           static_cast<std::uint64_t>(purpose);
}

class SeededRng {
  public:
    explicit SeededRng(std::uint64_t seed, std::uint64_t stream = 0)
        : base_(mix(mix(seed) ^ mix(stream))), counter_(0) {}

    std::uint64_t next_u64() {
        ++counter_;
        return mix(base_ + counter_ * golden);
    }

    // Uniform on the open interval (0, 1); never returns 0 or 1 exactly, so
    // log/quantile transforms are always finite.
    double uniform() {
        const std::uint64_t bits = next_u64() >> 11;  // top 53 bits
        return (static_cast<double>(bits) + 0.5) * 0x1p-53;
    }

    // Standard normal draw via the inverse-CDF transform (one uniform each).
    double gaussian() { return gaussian_q_inv(uniform()); }

  private:
    static constexpr std::uint64_t golden = 0x9e3779b97f4a7c15ull;

    // SplitMix64 output finalizer.
    static std::uint64_t mix(std::uint64_t z) {
        z += golden;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::uint64_t base_;
    std::uint64_t counter_;
};

}  // namespace specsense
