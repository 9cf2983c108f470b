#pragma once

#include "gofmc/core/dataset.hpp"
#include "gofmc/core/error.hpp"
#include "gofmc/core/types.hpp"
#include "gofmc/models/sampling.hpp"
#include "gofmc/models/zipf.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gofmc {

/// Sorted-Zipf pmf: p_j = C_theta / phi(j)^theta.
inline std::vector<double> sorted_zipf_pmf(double theta, const Permutation& order) {
    const auto base = zipf_pmf(theta, order.size());
    std::vector<double> p(order.size());
    for (std::size_t j = 1; j <= order.size(); ++j) p[j - 1] = base[order(j) - 1];
    return p;
}

/// Rank of each bin by descending count; equal counts keep bin order.
inline Permutation rank_order(std::span<const std::int64_t> counts) {
    std::vector<std::size_t> bins(counts.size());
    std::iota(bins.begin(), bins.end(), std::size_t{0});
    std::stable_sort(bins.begin(), bins.end(),
                     [&](std::size_t a, std::size_t b) { return counts[a] > counts[b]; });
    std::vector<std::size_t> rank(counts.size());
    for (std::size_t r = 0; r < bins.size(); ++r) rank[bins[r]] = r + 1;
    return Permutation(std::move(rank));
}

/// Joint MLE of (phi, theta): phi-hat sorts the bins into rank order, then
/// theta-hat is the Zipf MLE of the rank-relabeled counts.
inline FitResult sorted_zipf_mle(std::span<const std::int64_t> counts, double theta_max = kZipfThetaMax) {
    Permutation order = rank_order(counts);
    std::vector<std::int64_t> by_rank(counts.size());
    for (std::size_t j = 1; j <= counts.size(); ++j) by_rank[order(j) - 1] = counts[j - 1];
    FitResult fit = zipf_mle(by_rank, theta_max);
    fit.params.permutation = std::move(order);
    return fit;
}

/// Sorted Zipf with the bin order as parameter of interest. Simulation draws
/// from p0(phi0, theta-hat), phi0 being the hypothesized order (identity by
/// default); the fitted distribution is p0(phi-hat, theta-hat) and carries
/// both orders for ranking divergences.
class SortedZipfModel {
public:
    explicit SortedZipfModel(std::size_t bins, std::optional<Permutation> null_order = std::nullopt,
                             double theta_max = kZipfThetaMax)
        : bins_(bins),
          null_order_(null_order ? std::move(*null_order) : Permutation::identity(bins)),
          theta_max_(theta_max) {
        if (bins < 2) throw DataError("sorted Zipf needs at least two bins");
        if (null_order_.size() != bins) throw DataError("hypothesized order has the wrong length");
    }

    std::string name() const { return "sorted-zipf"; }
    std::size_t num_bins() const noexcept { return bins_; }
    const Permutation& null_order() const noexcept { return null_order_; }

    FitResult estimate(const Dataset& data) const {
        const Counts& c = data.counts();
        if (c.num_bins() != bins_)
            throw DataError("expected " + std::to_string(bins_) + " bins, got " + std::to_string(c.num_bins()));
        return sorted_zipf_mle(c.bins, theta_max_);
    }

    std::vector<double> sampling_pmf(const ParamVector& params) const {
        return sorted_zipf_pmf(power(params), null_order_);
    }

    Dataset sample(const ParamVector& params, const DesignInfo& design, RandomStream& rng) const {
        const auto pmf = sampling_pmf(params);
        return Dataset(Counts{sample_categorical_counts(pmf, design.n, rng)});
    }

    FittedDistribution fitted_distribution(const ParamVector& params, const DesignInfo&) const {
        const Permutation& order = params.permutation ? *params.permutation : null_order_;
        return ProbabilityMass{sorted_zipf_pmf(power(params), order), order, null_order_};
    }

private:
    static double power(const ParamVector& params) {
        if (params.size() != 1) throw DataError("sorted Zipf takes exactly one real parameter");
        return params[0];
    }

    std::size_t bins_;
    Permutation null_order_;
    double theta_max_;
};

}  // namespace gofmc
