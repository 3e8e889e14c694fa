#pragma once

#include <cstdint>
#include <vector>

namespace turbo {

using Bit = std::uint8_t;
using Bits = std::vector<Bit>;

/// Log-likelihood ratios. Positive values favour bit 0 (symbol +1).
using Llrs = std::vector<double>;

} // namespace turbo
