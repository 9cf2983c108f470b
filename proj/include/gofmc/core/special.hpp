#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace gofmc::detail {

inline constexpr int kLogFactorialTableSize = 256;

inline const std::array<double, kLogFactorialTableSize>& log_factorial_table() {
    static const auto table = [] {
        std::array<double, kLogFactorialTableSize> t{};
        t[0] = 0.0;
        for (int k = 1; k < kLogFactorialTableSize; ++k) t[k] = t[k - 1] + std::log(double(k));
        return t;
    }();
    return table;
}

/// ln(k!). Tabulated below 256, Stirling series above (error < 1e-15).
/// std::lgamma is avoided because it writes a global sign variable.
inline double log_factorial(std::int64_t k) {
    if (k < kLogFactorialTableSize) return log_factorial_table()[static_cast<std::size_t>(k)];
    const double x = static_cast<double>(k) + 1.0;
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    return (x - 0.5) * std::log(x) - x + 0.5 * std::log(2.0 * std::numbers::pi) +
           inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)));
}

/// y ln(y / mu) with the 0 ln 0 = 0 convention.
inline double xlogx_over(double y, double mu) { return y == 0.0 ? 0.0 : y * std::log(y / mu); }

}  // namespace gofmc::detail
