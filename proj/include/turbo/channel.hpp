#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "turbo/random.hpp"
#include "turbo/types.hpp"

namespace turbo {

/// BPSK over AWGN with unit symbol energy.
struct ChannelParams {
    double ebn0_db = 0.0;
    double code_rate = 1.0;
    double sigma = 1.0; // noise standard deviation per real dimension
    double lc = 2.0;    // channel reliability 2 / sigma^2
};

inline ChannelParams derive_params(double ebn0_db, double code_rate)
{
    if (!(code_rate > 0.0 && code_rate <= 1.0))
        throw std::invalid_argument("code rate must be in (0, 1]");
    const double ebn0 = std::pow(10.0, ebn0_db / 10.0);
    const double variance = 1.0 / (2.0 * code_rate * ebn0);
    return ChannelParams{ebn0_db, code_rate, std::sqrt(variance), 2.0 / variance};
}

/// Bit 0 maps to +1, bit 1 to -1.
inline std::vector<double> modulate(std::span<const Bit> bits)
{
    std::vector<double> out(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i)
        out[i] = bits[i] ? -1.0 : 1.0;
    return out;
}

inline std::vector<double> add_noise(std::span<const double> symbols, double sigma, Rng& rng)
{
    if (!(sigma > 0.0))
        throw std::invalid_argument("noise sigma must be positive");
    std::vector<double> out(symbols.size());
    for (std::size_t i = 0; i < symbols.size(); ++i)
        out[i] = symbols[i] + sigma * rng.gaussian();
    return out;
}

/// llr = lc * y; positive means bit 0 is more likely.
inline Llrs to_channel_llr(std::span<const double> received, double lc)
{
    if (!(lc > 0.0))
        throw std::invalid_argument("channel reliability must be positive");
    Llrs out(received.size());
    for (std::size_t i = 0; i < received.size(); ++i)
        out[i] = lc * received[i];
    return out;
}

} // namespace turbo
