#pragma once

#include "gofmc/core/dataset.hpp"
#include "gofmc/core/error.hpp"
#include "gofmc/core/rng.hpp"
#include "gofmc/core/types.hpp"
#include "gofmc/models/sampling.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace gofmc {

/// Upper end of the Zipf power search. Past this the pmf is degenerate in
/// double precision.
inline constexpr double kZipfThetaMax = 50.0;

/// Zipf pmf over m bins: p_j = C / j^theta with C = 1 / sum_j j^-theta.
inline std::vector<double> zipf_pmf(double theta, std::size_t m) {
    if (!(theta >= 0.0) || !std::isfinite(theta)) throw DataError("Zipf power must be finite and >= 0");
    if (m < 2) throw DataError("Zipf needs at least two bins");
    std::vector<double> p(m);
    double z = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        p[j] = std::exp(-theta * std::log(static_cast<double>(j + 1)));
        z += p[j];
    }
    for (double& v : p) v /= z;
    return p;
}

namespace detail {

/// Moments of ln J under Zipf(theta): E[ln J] and Var[ln J].
struct LogRankMoments {
    double mean;
    double variance;
};

inline LogRankMoments zipf_log_rank_moments(double theta, std::span<const double> log_ranks) {
    double z = 0.0, s1 = 0.0, s2 = 0.0;
    for (double lj : log_ranks) {
        const double w = std::exp(-theta * lj);
        z += w;
        s1 += w * lj;
        s2 += w * lj * lj;
    }
    const double mean = s1 / z;
    return {mean, std::max(0.0, s2 / z - mean * mean)};
}

inline double zipf_log_normalizer(double theta, std::span<const double> log_ranks) {
    double z = 0.0;
    for (double lj : log_ranks) z += std::exp(-theta * lj);
    return std::log(z);
}

}  // namespace detail

/// ln L(theta) = -n ln(sum_j j^-theta) - theta sum_k ln j_k for bin counts.
inline double zipf_log_likelihood(double theta, std::span<const std::int64_t> counts) {
    std::vector<double> log_ranks(counts.size());
    double n = 0.0, log_rank_sum = 0.0;
    for (std::size_t j = 0; j < counts.size(); ++j) {
        log_ranks[j] = std::log(static_cast<double>(j + 1));
        n += static_cast<double>(counts[j]);
        log_rank_sum += static_cast<double>(counts[j]) * log_ranks[j];
    }
    return -n * detail::zipf_log_normalizer(theta, log_ranks) - theta * log_rank_sum;
}

/// Maximum-likelihood Zipf power on [0, theta_max]. The log-likelihood is
/// concave in theta, so the score n E[ln J] - sum ln j_k has at most one
/// root; it is found by Newton steps kept inside a shrinking bracket.
inline FitResult zipf_mle(std::span<const std::int64_t> counts, double theta_max = kZipfThetaMax) {
    const std::size_t m = counts.size();
    if (m < 2) throw DataError("Zipf needs at least two bins");
    std::vector<double> log_ranks(m);
    double n = 0.0, log_rank_sum = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        if (counts[j] < 0) throw DataError("bin counts must be nonnegative");
        log_ranks[j] = std::log(static_cast<double>(j + 1));
        n += static_cast<double>(counts[j]);
        log_rank_sum += static_cast<double>(counts[j]) * log_ranks[j];
    }
    if (n < 1.0) throw DataError("counts must total at least 1");

    const double target = log_rank_sum / n;  // score / n = E_theta[ln J] - target
    // Rounding-level slack so exactly uniform counts land on the boundary.
    const double slack = 1e-13 * (1.0 + log_ranks.back());

    auto finish = [&](double theta, std::size_t iterations, bool converged, bool boundary) {
        FitResult fit;
        fit.params.values = {theta};
        fit.log_likelihood = -n * detail::zipf_log_normalizer(theta, log_ranks) - theta * log_rank_sum;
        fit.iterations = iterations;
        fit.converged = converged;
        fit.at_boundary = boundary;
        return fit;
    };

    if (detail::zipf_log_rank_moments(0.0, log_ranks).mean - target <= slack)
        return finish(0.0, 0, true, true);
    if (detail::zipf_log_rank_moments(theta_max, log_ranks).mean - target >= 0.0)
        return finish(theta_max, 0, true, true);

    double lo = 0.0, hi = theta_max;
    double theta = 1.0;
    for (std::size_t it = 1; it <= 200; ++it) {
        const auto mom = detail::zipf_log_rank_moments(theta, log_ranks);
        const double g = mom.mean - target;  // decreasing in theta
        if (g > 0.0) lo = theta;
        else hi = theta;
        if (std::fabs(g) <= 1e-14 * (1.0 + target) || hi - lo <= 1e-15 * (1.0 + theta))
            return finish(theta, it, true, false);
        double next = mom.variance > 0.0 ? theta + g / mom.variance : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (next == theta) return finish(theta, it, true, false);
        theta = next;
    }
    return finish(theta, 200, false, false);
}

/// Zipf over a fixed number of bins, with theta estimated by maximum likelihood.
class ZipfModel {
public:
    explicit ZipfModel(std::size_t bins, double theta_max = kZipfThetaMax)
        : bins_(bins), theta_max_(theta_max) {
        if (bins < 2) throw DataError("Zipf needs at least two bins");
    }

    std::string name() const { return "zipf"; }
    std::size_t num_bins() const noexcept { return bins_; }
    double theta_max() const noexcept { return theta_max_; }

    FitResult estimate(const Dataset& data) const {
        const Counts& c = data.counts();
        check_bins(c);
        return zipf_mle(c.bins, theta_max_);
    }

    std::vector<double> sampling_pmf(const ParamVector& params) const { return zipf_pmf(power(params), bins_); }

    Dataset sample(const ParamVector& params, const DesignInfo& design, RandomStream& rng) const {
        const auto pmf = sampling_pmf(params);
        return Dataset(Counts{sample_categorical_counts(pmf, design.n, rng)});
    }

    FittedDistribution fitted_distribution(const ParamVector& params, const DesignInfo&) const {
        return ProbabilityMass{sampling_pmf(params), std::nullopt, std::nullopt};
    }

private:
    static double power(const ParamVector& params) {
        if (params.size() != 1) throw DataError("Zipf takes exactly one parameter");
        return params[0];
    }

    void check_bins(const Counts& c) const {
        if (c.num_bins() != bins_)
            throw DataError("expected " + std::to_string(bins_) + " bins, got " + std::to_string(c.num_bins()));
    }

    std::size_t bins_;
    double theta_max_;
};

}  // namespace gofmc
