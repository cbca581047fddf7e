#include "estlab/rng.hpp"

#include <bit>
#include <cmath>
#include <numbers>

namespace estlab {

Xoshiro256StarStar::Xoshiro256StarStar(std::uint64_t seed) noexcept
{
    SplitMix64 sm(seed);
    for (auto& word : s_) word = sm.next();
}

Xoshiro256StarStar::result_type Xoshiro256StarStar::operator()() noexcept
{
    const std::uint64_t result = std::rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = std::rotl(s_[3], 45);
    return result;
}

Xoshiro256StarStar make_stream(std::uint64_t seed, std::uint64_t index) noexcept
{
    return Xoshiro256StarStar(SplitMix64::mix(seed ^ SplitMix64::mix(index + 0x9E3779B97F4A7C15ULL)));
}

Xoshiro256StarStar make_stream(std::uint64_t seed, StreamDomain domain, std::uint64_t index) noexcept
{
    const auto d = static_cast<std::uint64_t>(domain);
    return make_stream(SplitMix64::mix(seed + d * 0xD1B54A32D192ED03ULL), index);
}

std::uint64_t uniform_below(Xoshiro256StarStar& rng, std::uint64_t bound) noexcept
{
    __extension__ typedef unsigned __int128 u128;
    std::uint64_t x = rng();
    u128 m = static_cast<u128>(x) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        while (low < threshold) {
            x = rng();
            m = static_cast<u128>(x) * bound;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

double uniform_open_closed(Xoshiro256StarStar& rng) noexcept
{
    return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
}

double standard_normal(Xoshiro256StarStar& rng) noexcept
{
    const double u1 = uniform_open_closed(rng);
    const double u2 = uniform_open_closed(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace estlab
