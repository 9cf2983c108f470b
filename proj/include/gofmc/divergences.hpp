#pragma once

// Discrepancy measures between data and a fitted model: chi-square for bin
// counts, the Poisson deviance g^2, the Kolmogorov-Smirnov distance for real
// samples, and the normalized Kendall tau distance between bin orders.

#include "gofmc/core/dataset.hpp"
#include "gofmc/core/error.hpp"
#include "gofmc/core/special.hpp"
#include "gofmc/core/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace gofmc {

/// Stand-in for an infinite chi-square (a count in a zero-probability bin).
/// Finite, so it serializes, and larger than any attainable statistic.
inline constexpr double kMaxDivergence = std::numeric_limits<double>::max();

inline double chi_square(std::span<const std::int64_t> counts, std::span<const double> pmf) {
    if (counts.size() != pmf.size()) throw DataError("chi-square: counts and pmf lengths differ");
    double n = 0.0;
    for (auto c : counts) n += static_cast<double>(c);
    double stat = 0.0;
    for (std::size_t j = 0; j < counts.size(); ++j) {
        const double expected = n * pmf[j];
        const double observed = static_cast<double>(counts[j]);
        if (expected <= 0.0) {
            if (observed > 0.0) return kMaxDivergence;
            continue;
        }
        const double diff = observed - expected;
        stat += diff * diff / expected;
    }
    return stat;
}

/// g^2 = 2 sum_k y_k ln(y_k / mu_k), with 0 ln 0 = 0. May be negative when
/// the means do not sum to the counts. A zero mean is allowed only where the
/// count is zero too; a positive count there gives kMaxDivergence.
inline double deviance_g2(std::span<const std::int64_t> y, std::span<const double> mu) {
    if (y.size() != mu.size()) throw DataError("deviance: response and mean lengths differ");
    double sum = 0.0;
    for (std::size_t k = 0; k < y.size(); ++k) {
        if (!(mu[k] >= 0.0) || !std::isfinite(mu[k])) throw DataError("deviance: means must be finite and >= 0");
        if (mu[k] == 0.0) {
            if (y[k] > 0) return kMaxDivergence;
            continue;
        }
        sum += detail::xlogx_over(static_cast<double>(y[k]), mu[k]);
    }
    return 2.0 * sum;
}

/// sup_x |F_n(x) - F(x)|. Checked at each distinct sample point and just
/// below it, which covers both continuous and lattice model CDFs.
inline double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) throw DataError("KS statistic needs at least one sample");
    std::vector<double> x(samples.begin(), samples.end());
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double sup = 0.0;
    std::size_t i = 0;
    while (i < x.size()) {
        std::size_t j = i;
        while (j < x.size() && x[j] == x[i]) ++j;
        const double below = static_cast<double>(i) / n;
        const double at = static_cast<double>(j) / n;
        const double f_at = cdf(x[i]);
        const double f_below = cdf(std::nextafter(x[i], -std::numeric_limits<double>::infinity()));
        sup = std::max({sup, std::fabs(at - f_at), std::fabs(below - f_below)});
        i = j;
    }
    return std::min(sup, 1.0);
}

/// Kendall tau distance: discordant pairs divided by m(m-1)/2.
inline double permutation_divergence(const Permutation& estimated, const Permutation& hypothesized) {
    const std::size_t m = estimated.size();
    if (hypothesized.size() != m) throw DataError("permutation divergence: sizes differ");
    if (m < 2) return 0.0;
    std::size_t discordant = 0;
    for (std::size_t a = 1; a <= m; ++a)
        for (std::size_t b = a + 1; b <= m; ++b) {
            const bool first = estimated(a) < estimated(b);
            const bool second = hypothesized(a) < hypothesized(b);
            if (first != second) ++discordant;
        }
    return static_cast<double>(discordant) / (static_cast<double>(m * (m - 1)) / 2.0);
}

namespace detail {

template <class T>
const T& fitted_as(const FittedDistribution& fitted, const char* divergence) {
    if (const T* p = std::get_if<T>(&fitted)) return *p;
    throw DataError(std::string(divergence) + ": fitted distribution has the wrong shape");
}

}  // namespace detail

struct ChiSquare {
    std::string name() const { return "chi2"; }
    DataShape shape() const noexcept { return DataShape::Counts; }
    double evaluate(const Dataset& data, const FittedDistribution& fitted) const {
        return chi_square(data.counts().bins, detail::fitted_as<ProbabilityMass>(fitted, "chi2").pmf);
    }
};

struct Deviance {
    std::string name() const { return "g2"; }
    DataShape shape() const noexcept { return DataShape::RegressionPairs; }
    double evaluate(const Dataset& data, const FittedDistribution& fitted) const {
        return deviance_g2(data.pairs().y, detail::fitted_as<FittedMeans>(fitted, "g2").means);
    }
};

struct KolmogorovSmirnov {
    std::string name() const { return "ks"; }
    DataShape shape() const noexcept { return DataShape::RealSamples; }
    double evaluate(const Dataset& data, const FittedDistribution& fitted) const {
        return ks_statistic(data.samples().values, detail::fitted_as<CumulativeDistribution>(fitted, "ks").cdf);
    }
};

/// Distance between the estimated and hypothesized bin orders; needs a
/// family that reports both (sorted Zipf).
struct KendallTau {
    std::string name() const { return "kendall"; }
    DataShape shape() const noexcept { return DataShape::Counts; }
    double evaluate(const Dataset&, const FittedDistribution& fitted) const {
        const auto& mass = detail::fitted_as<ProbabilityMass>(fitted, "kendall");
        if (!mass.estimated_order || !mass.hypothesized_order)
            throw DataError("kendall: the model does not report bin orders");
        return permutation_divergence(*mass.estimated_order, *mass.hypothesized_order);
    }
};

}  // namespace gofmc
