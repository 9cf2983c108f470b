#pragma once

// Portable samplers on top of RandomStream. The standard library's
// distributions are implementation-defined, which would make golden outputs
// depend on the toolchain.

#include "gofmc/core/rng.hpp"
#include "gofmc/core/special.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace gofmc {

/// n i.i.d. categorical draws from pmf, returned as bin counts.
inline std::vector<std::int64_t> sample_categorical_counts(std::span<const double> pmf, std::size_t n,
                                                           RandomStream& rng) {
    std::vector<double> cdf(pmf.size());
    double acc = 0.0;
    for (std::size_t j = 0; j < pmf.size(); ++j) {
        acc += pmf[j];
        cdf[j] = acc;
    }
    std::vector<std::int64_t> counts(pmf.size(), 0);
    const std::size_t last = pmf.size() - 1;
    for (std::size_t i = 0; i < n; ++i) {
        const double u = rng.uniform() * acc;
        std::size_t bin = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        bin = std::min(bin, last);
        // Skip zero-probability bins that upper_bound can land on at the far end.
        while (pmf[bin] <= 0.0 && bin > 0) --bin;
        ++counts[bin];
    }
    return counts;
}

/// Poisson variate. Sequential inversion for small means; Hörmann's PTRS
/// transformed rejection above 10.
inline std::int64_t sample_poisson(double mean, RandomStream& rng) {
    if (!(mean > 0.0)) return 0;
    if (mean < 10.0) {
        double p = std::exp(-mean);
        double cumulative = p;
        const double u = rng.uniform();
        std::int64_t k = 0;
        while (u > cumulative) {
            ++k;
            p *= mean / static_cast<double>(k);
            const double next = cumulative + p;
            if (next == cumulative) break;
            cumulative = next;
        }
        return k;
    }

    const double log_mean = std::log(mean);
    const double b = 0.931 + 2.53 * std::sqrt(mean);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
        const double u = rng.uniform() - 0.5;
        const double v = rng.uniform_open();
        const double us = 0.5 - std::fabs(u);
        const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= v_r) return static_cast<std::int64_t>(k);
        if (k < 0.0 || (us < 0.013 && v > us)) continue;
        const double lhs = std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b);
        const double rhs = -mean + k * log_mean - detail::log_factorial(static_cast<std::int64_t>(k));
        if (lhs <= rhs) return static_cast<std::int64_t>(k);
    }
}

inline double sample_exponential(double rate, RandomStream& rng) {
    return -std::log(rng.uniform_open()) / rate;
}

}  // namespace gofmc
