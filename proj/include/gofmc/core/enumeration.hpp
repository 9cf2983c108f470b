#pragma once

#include "gofmc/core/concepts.hpp"
#include "gofmc/core/engine.hpp"
#include "gofmc/core/error.hpp"
#include "gofmc/core/special.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace gofmc {

inline constexpr std::size_t kEnumerationMaxBins = 4;
inline constexpr std::int64_t kEnumerationMaxDraws = 8;

struct ExactPValue {
    double p_value = 0.0;
    double observed_divergence = 0.0;
    ParamVector theta_hat;
    /// Number of distinct count vectors visited.
    std::size_t outcomes = 0;
};

/// Calls visit(counts) for every vector of m nonnegative integers summing to n.
inline void for_each_composition(std::size_t m, std::int64_t n,
                                 const std::function<void(const std::vector<std::int64_t>&)>& visit) {
    std::vector<std::int64_t> counts(m, 0);
    std::function<void(std::size_t, std::int64_t)> recurse = [&](std::size_t bin, std::int64_t left) {
        if (bin + 1 == m) {
            counts[bin] = left;
            visit(counts);
            return;
        }
        for (std::int64_t c = left; c >= 0; --c) {
            counts[bin] = c;
            recurse(bin + 1, left - c);
        }
    };
    recurse(0, n);
}

/// Exact Pr(D >= d) under p0(theta-hat) for small categorical instances,
/// re-estimating theta on every possible outcome as the simulation does.
template <CountsModelFamily Model, DivergenceMeasure Divergence>
ExactPValue exact_p_value_enumeration(const Model& model, const Divergence& divergence,
                                      const Dataset& data) {
    const Counts& observed = data.counts();
    const std::size_t m = observed.num_bins();
    const std::int64_t n = observed.total();
    if (m > kEnumerationMaxBins || n > kEnumerationMaxDraws)
        throw EnumerationBudgetError("exact enumeration supports m <= 4 and n <= 8 (got m=" +
                                     std::to_string(m) + ", n=" + std::to_string(n) + ")");

    const FitResult fit = model.estimate(data);
    if (!fit.usable()) throw EstimationError("estimation on observed data did not converge");
    const DesignInfo design = design_of(data);
    const double d = static_cast<double>(divergence.evaluate(data, model.fitted_distribution(fit.params, design)));
    const std::vector<double> pmf = model.sampling_pmf(fit.params);

    ExactPValue result;
    result.observed_divergence = d;
    result.theta_hat = fit.params;
    double total = 0.0;
    for_each_composition(m, n, [&](const std::vector<std::int64_t>& counts) {
        ++result.outcomes;
        double log_prob = detail::log_factorial(n);
        for (std::size_t j = 0; j < m; ++j) {
            if (counts[j] == 0) continue;
            if (pmf[j] <= 0.0) return;
            log_prob += static_cast<double>(counts[j]) * std::log(pmf[j]) - detail::log_factorial(counts[j]);
        }
        const Dataset outcome(Counts{counts});
        const FitResult refit = model.estimate(outcome);
        if (!refit.usable()) throw EstimationError("estimation failed on an enumerated outcome");
        const double big_d =
            static_cast<double>(divergence.evaluate(outcome, model.fitted_distribution(refit.params, design)));
        if (reaches(big_d, d)) total += std::exp(log_prob);
    });
    result.p_value = std::min(total, 1.0);
    return result;
}

}  // namespace gofmc
