#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace ftpl {

namespace detail {

// Uniform in [0,1) from the top 53 bits; independent of the standard library's
// distribution implementations so streams are reproducible across toolchains.
template <typename Rng>
double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace detail

template <typename Rng>
double IncomeJumps::holding_time(std::size_t z, Rng& rng) const {
    if (exit_[z] <= 0.0) return std::numeric_limits<double>::infinity();
    return -std::log1p(-detail::uniform01(rng)) / exit_[z];
}

template <typename Rng>
std::size_t IncomeJumps::next_state(std::size_t z, Rng& rng) const {
    const double u = detail::uniform01(rng) * exit_[z];
    const auto& cum = cumulative_[z];
    for (std::size_t y = 0; y < cum.size(); ++y) {
        if (y != z && u < cum[y]) return y;
    }
    // Rounding at the top end: last reachable state.
    for (std::size_t y = cum.size(); y-- > 0;) {
        if (y != z && (y == 0 ? cum[0] : cum[y] - cum[y - 1]) > 0.0) return y;
    }
    return z;
}

}  // namespace ftpl
