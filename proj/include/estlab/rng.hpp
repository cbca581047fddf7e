#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace estlab {

/// SplitMix64 (Steele, Lea, Flood 2014). Used to expand seeds and to hash
/// (seed, stream index) pairs into stream keys.
class SplitMix64 {
public:
    explicit constexpr SplitMix64(std::uint64_t state) noexcept : state_(state) {}

    constexpr std::uint64_t next() noexcept
    {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix(state_);
    }

    static constexpr std::uint64_t mix(std::uint64_t z) noexcept
    {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

/// xoshiro256** 1.0 (Blackman, Vigna). Satisfies UniformRandomBitGenerator.
class Xoshiro256StarStar {
public:
    using result_type = std::uint64_t;

    explicit Xoshiro256StarStar(std::uint64_t seed) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept;

private:
    std::array<std::uint64_t, 4> s_{};
};

/// Generator for stream `index` under master `seed`. Depends only on the pair,
/// so replicates can be evaluated in any order or on any thread.
[[nodiscard]] Xoshiro256StarStar make_stream(std::uint64_t seed, std::uint64_t index) noexcept;

/// Stream domains keep e.g. population synthesis and replicate draws apart
/// even when both are driven by the same user seed.
enum class StreamDomain : std::uint64_t { Replicate = 0, Synthesis = 1, SingleDraw = 2 };

[[nodiscard]] Xoshiro256StarStar make_stream(std::uint64_t seed, StreamDomain domain,
                                             std::uint64_t index) noexcept;

/// Uniform integer in [0, bound) by Lemire's multiply-and-reject. bound > 0.
[[nodiscard]] std::uint64_t uniform_below(Xoshiro256StarStar& rng, std::uint64_t bound) noexcept;

/// Uniform double in (0, 1], 53-bit resolution.
[[nodiscard]] double uniform_open_closed(Xoshiro256StarStar& rng) noexcept;

/// Standard normal by the Box-Muller transform (one value per call).
[[nodiscard]] double standard_normal(Xoshiro256StarStar& rng) noexcept;

}  // namespace estlab
