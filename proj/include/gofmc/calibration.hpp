#pragma once

// Empirical check that plug-in P-values are close to uniform when the data
// really come from the tested family, and a power harness when they do not.

#include "gofmc/core/concepts.hpp"
#include "gofmc/core/engine.hpp"
#include "gofmc/core/error.hpp"
#include "gofmc/core/parallel.hpp"
#include "gofmc/core/rng.hpp"
#include "gofmc/divergences.hpp"

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace gofmc {

inline constexpr std::array<double, 3> kNominalLevels{0.01, 0.05, 0.10};

template <ModelFamily Generating, ModelFamily Tested, DivergenceMeasure Divergence>
struct CalibrationSpec {
    Generating generating;
    ParamVector true_params;
    /// Sample size and covariates of every generated dataset.
    DesignInfo design;
    Tested tested;
    Divergence divergence;
    std::size_t simulations = 400;
    std::size_t replications = 400;
    std::uint64_t seed = kDefaultSeed;
    unsigned threads = 1;
};

struct CalibrationSummary {
    std::vector<double> p_values;
    double ks_distance = 0.0;
    /// Fraction of replicates with P <= level, one per kNominalLevels entry.
    std::array<double, 3> rejection_rates{};
    std::size_t excluded_replicates = 0;
};

/// Kolmogorov-Smirnov distance of the values from U[0, 1].
inline double uniform_ks_distance(std::span<const double> values) {
    return ks_statistic(values, [](double x) { return std::clamp(x, 0.0, 1.0); });
}

inline CalibrationSummary summarize_p_values(std::vector<double> p_values) {
    CalibrationSummary summary;
    summary.ks_distance = uniform_ks_distance(p_values);
    const double r = static_cast<double>(p_values.size());
    for (std::size_t a = 0; a < kNominalLevels.size(); ++a) {
        const auto hits = std::count_if(p_values.begin(), p_values.end(),
                                        [&](double p) { return p <= kNominalLevels[a]; });
        summary.rejection_rates[a] = static_cast<double>(hits) / r;
    }
    summary.p_values = std::move(p_values);
    return summary;
}

/// Replicate r draws its data from stream (derive_seed(seed, r, 1), 0) and
/// runs the engine with seed derive_seed(seed, r, 2).
template <ModelFamily Generating, ModelFamily Tested, DivergenceMeasure Divergence>
CalibrationSummary run_calibration(const CalibrationSpec<Generating, Tested, Divergence>& spec) {
    if (spec.replications < 1) throw ConfigError("calibration needs at least one replicate");
    if (spec.simulations < 1) throw ConfigError("calibration needs at least one simulation per test");
    if (spec.design.n < 1) throw ConfigError("calibration needs n >= 1");

    std::vector<double> p_values(spec.replications);
    std::vector<std::size_t> excluded(spec.replications);
    parallel_for(spec.replications, spec.threads, [&](std::size_t r) {
        try {
            RandomStream data_rng(derive_seed(spec.seed, r, 1), 0);
            const Dataset data = spec.generating.sample(spec.true_params, spec.design, data_rng);
            SimulationOptions options;
            options.simulations = spec.simulations;
            options.seed = derive_seed(spec.seed, r, 2);
            const PValueReport report = estimate_p_value(spec.tested, spec.divergence, data, options);
            p_values[r] = report.p_hat;
            excluded[r] = report.excluded_replicates;
        } catch (const Error& e) {
            throw SimulationError("calibration replicate " + std::to_string(r) + ": " + e.what());
        }
    });

    CalibrationSummary summary = summarize_p_values(std::move(p_values));
    for (auto e : excluded) summary.excluded_replicates += e;
    return summary;
}

}  // namespace gofmc
