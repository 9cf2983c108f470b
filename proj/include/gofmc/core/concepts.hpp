#pragma once

#include "gofmc/core/dataset.hpp"
#include "gofmc/core/rng.hpp"
#include "gofmc/core/types.hpp"

#include <concepts>
#include <string>
#include <vector>

namespace gofmc {

/// A parametric family p0(theta) together with its estimator. The triple
/// (estimate, sample, fitted_distribution) defines the data-dependent null.
/// Implementations must be safe to call concurrently on distinct inputs.
template <class M>
concept ModelFamily = requires(const M& model, const Dataset& data, const ParamVector& params,
                               const DesignInfo& design, RandomStream& rng) {
    { model.estimate(data) } -> std::same_as<FitResult>;
    { model.sample(params, design, rng) } -> std::same_as<Dataset>;
    { model.fitted_distribution(params, design) } -> std::same_as<FittedDistribution>;
    { model.name() } -> std::convertible_to<std::string>;
};

/// Categorical families additionally expose the probabilities their sampler
/// draws from, which exact enumeration needs.
template <class M>
concept CountsModelFamily = ModelFamily<M> && requires(const M& model, const ParamVector& params) {
    { model.sampling_pmf(params) } -> std::same_as<std::vector<double>>;
    { model.num_bins() } -> std::convertible_to<std::size_t>;
};

template <class D>
concept DivergenceMeasure = requires(const D& divergence, const Dataset& data,
                                     const FittedDistribution& fitted) {
    { divergence.evaluate(data, fitted) } -> std::convertible_to<double>;
    { divergence.name() } -> std::convertible_to<std::string>;
};

}  // namespace gofmc
