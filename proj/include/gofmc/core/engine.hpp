#pragma once

// Monte Carlo P-values for simple data-dependent hypotheses: fit theta-hat
// on the observed data, then repeatedly simulate from p0(theta-hat), re-fit,
// and count how often the simulated divergence reaches the observed one.

#include "gofmc/core/concepts.hpp"
#include "gofmc/core/error.hpp"
#include "gofmc/core/parallel.hpp"
#include "gofmc/core/rng.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gofmc {

/// Relative slack under which two divergences count as tied. Divergences
/// that are mathematically equal can differ in the last bits when the same
/// formula is summed in a different order.
inline constexpr double kTieRelativeTolerance = 1e-12;

/// D >= d, with ties (including rounding-level ties) counted as exceedances.
inline bool reaches(double simulated, double observed) noexcept {
    return simulated >= observed - kTieRelativeTolerance * std::fabs(observed);
}

inline double p_value_stderr(double p_hat, std::size_t simulations) {
    if (simulations == 0) throw SimulationError("standard error needs at least one simulation");
    const double var = p_hat * (1.0 - p_hat);
    return var <= 0.0 ? 0.0 : std::sqrt(var / static_cast<double>(simulations));
}

inline std::size_t count_exceedances(std::span<const double> simulated, double observed) {
    std::size_t k = 0;
    for (double v : simulated)
        if (reaches(v, observed)) ++k;
    return k;
}

struct SimulationOptions {
    std::size_t simulations = 1000;
    std::uint64_t seed = kDefaultSeed;
    unsigned threads = 1;
    /// Also report the (k+1)/(l+1) estimate.
    bool plus_one = false;
    /// Keep every simulated divergence in the report (in simulation order).
    bool keep_divergences = false;
    /// Abort when more than this fraction of replicates fail to fit.
    double max_failure_fraction = 0.01;
};

struct PValueReport {
    double p_hat = 0.0;
    double std_error = 0.0;
    double observed_divergence = 0.0;
    /// Effective number of simulations: requested minus excluded.
    std::size_t num_simulations = 0;
    std::size_t requested_simulations = 0;
    std::size_t exceed_count = 0;
    std::size_t excluded_replicates = 0;
    ParamVector theta_hat;
    FitResult observed_fit;
    std::uint64_t seed = 0;
    std::optional<double> p_plus_one;
    /// Simulated divergences; std::nullopt marks an excluded replicate.
    std::vector<std::optional<double>> simulated_divergences;
};

namespace detail {

/// Outcome of one three-step simulation; nullopt when the re-fit failed.
template <ModelFamily Model, DivergenceMeasure Divergence>
std::optional<double> simulate_once(const Model& model, const Divergence& divergence,
                                    const ParamVector& theta_hat, const DesignInfo& design,
                                    std::uint64_t seed, std::size_t index) {
    RandomStream rng(seed, index);
    const Dataset synthetic = model.sample(theta_hat, design, rng);
    FitResult refit;
    try {
        refit = model.estimate(synthetic);
    } catch (const EstimationError&) {
        return std::nullopt;
    }
    if (!refit.usable()) return std::nullopt;
    return static_cast<double>(
        divergence.evaluate(synthetic, model.fitted_distribution(refit.params, design)));
}

}  // namespace detail

template <ModelFamily Model, DivergenceMeasure Divergence>
PValueReport estimate_p_value(const Model& model, const Divergence& divergence,
                              const Dataset& data, const SimulationOptions& options) {
    if (options.simulations == 0) throw SimulationError("number of simulations must be >= 1");

    const FitResult fit = model.estimate(data);
    if (!fit.usable())
        throw EstimationError(std::string(model.name()) + ": estimation on observed data did not converge");
    const DesignInfo design = design_of(data);
    const double observed =
        static_cast<double>(divergence.evaluate(data, model.fitted_distribution(fit.params, design)));

    std::vector<std::optional<double>> simulated(options.simulations);
    parallel_for(options.simulations, options.threads, [&](std::size_t i) {
        simulated[i] = detail::simulate_once(model, divergence, fit.params, design, options.seed, i);
    });

    PValueReport report;
    report.observed_divergence = observed;
    report.requested_simulations = options.simulations;
    report.theta_hat = fit.params;
    report.observed_fit = fit;
    report.seed = options.seed;
    for (const auto& value : simulated) {
        if (!value) {
            ++report.excluded_replicates;
            continue;
        }
        if (reaches(*value, observed)) ++report.exceed_count;
    }
    if (static_cast<double>(report.excluded_replicates) >
        options.max_failure_fraction * static_cast<double>(options.simulations)) {
        throw SimulationError(std::to_string(report.excluded_replicates) + " of " +
                              std::to_string(options.simulations) +
                              " synthetic replicates failed to fit");
    }
    report.num_simulations = options.simulations - report.excluded_replicates;
    const double l = static_cast<double>(report.num_simulations);
    report.p_hat = static_cast<double>(report.exceed_count) / l;
    report.std_error = p_value_stderr(report.p_hat, report.num_simulations);
    if (options.plus_one)
        report.p_plus_one = (static_cast<double>(report.exceed_count) + 1.0) / (l + 1.0);
    if (options.keep_divergences) report.simulated_divergences = std::move(simulated);
    return report;
}

template <ModelFamily Model, DivergenceMeasure Divergence>
PValueReport estimate_p_value(const Model& model, const Divergence& divergence,
                              const Dataset& data, std::size_t simulations, std::uint64_t seed) {
    SimulationOptions options;
    options.simulations = simulations;
    options.seed = seed;
    return estimate_p_value(model, divergence, data, options);
}

}  // namespace gofmc
