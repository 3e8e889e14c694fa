#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "turbo/types.hpp"

namespace turbo {

/// splitmix64 finaliser
constexpr std::uint64_t mix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed for one Monte Carlo block. Depends only on its arguments, so results
/// do not change with the number of workers or the order blocks are run in.
constexpr std::uint64_t block_seed(std::uint64_t master, std::uint64_t point, std::uint64_t block) noexcept
{
    return mix64(mix64(mix64(master) ^ point) ^ block);
}

/// Deterministic generator over mt19937_64. The std distributions are
/// implementation defined, so uniform integers and Gaussians are derived
/// here (rejection sampling and Box-Muller) to keep streams portable.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    Bit bit() { return static_cast<Bit>(engine_() >> 63); }

    /// Uniform in [0, n).
    std::uint64_t below(std::uint64_t n)
    {
        const std::uint64_t limit = (~std::uint64_t{0}) - ((~std::uint64_t{0}) % n);
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    /// Uniform in (0, 1).
    double uniform_open()
    {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal, Box-Muller with the second value cached.
    double gaussian()
    {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform_open();
        const double u2 = uniform_open();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    Bits random_bits(std::size_t n)
    {
        Bits out(n);
        for (auto& b : out)
            b = bit();
        return out;
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace turbo
