#pragma once

#include "gofmc/core/dataset.hpp"
#include "gofmc/core/error.hpp"
#include "gofmc/core/special.hpp"
#include "gofmc/core/types.hpp"
#include "gofmc/models/sampling.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace gofmc {

/// Maps scalar covariates to design-matrix rows (1, f_1(x), ..., f_m(x)).
class DesignBuilder {
public:
    using Column = std::function<double(double)>;

    explicit DesignBuilder(std::vector<Column> columns, std::string label = "custom")
        : columns_(std::move(columns)), label_(std::move(label)) {}

    /// Columns x, x^2, ..., x^degree after the intercept.
    static DesignBuilder polynomial(std::size_t degree) {
        std::vector<Column> columns;
        for (std::size_t p = 1; p <= degree; ++p)
            columns.emplace_back([p](double x) {
                double v = 1.0;
                for (std::size_t i = 0; i < p; ++i) v *= x;
                return v;
            });
        return DesignBuilder(std::move(columns), "polynomial-" + std::to_string(degree));
    }

    std::size_t num_coefficients() const noexcept { return columns_.size() + 1; }
    const std::string& label() const noexcept { return label_; }

    Eigen::MatrixXd build(std::span<const double> x) const {
        Eigen::MatrixXd design(static_cast<Eigen::Index>(x.size()),
                               static_cast<Eigen::Index>(num_coefficients()));
        for (std::size_t k = 0; k < x.size(); ++k) {
            const auto row = static_cast<Eigen::Index>(k);
            design(row, 0) = 1.0;
            for (std::size_t c = 0; c < columns_.size(); ++c)
                design(row, static_cast<Eigen::Index>(c + 1)) = columns_[c](x[k]);
        }
        return design;
    }

private:
    std::vector<Column> columns_;
    std::string label_;
};

/// mu_k = exp(row_k . theta). Throws naming the first row whose mean is
/// not a positive finite number.
inline std::vector<double> poisson_glm_fitted_means(std::span<const double> coefficients,
                                                    const Eigen::MatrixXd& design) {
    if (static_cast<Eigen::Index>(coefficients.size()) != design.cols())
        throw DataError("coefficient count does not match design columns");
    std::vector<double> means(static_cast<std::size_t>(design.rows()));
    for (Eigen::Index k = 0; k < design.rows(); ++k) {
        double eta = 0.0;
        for (Eigen::Index c = 0; c < design.cols(); ++c) eta += design(k, c) * coefficients[static_cast<std::size_t>(c)];
        const double mu = std::exp(eta);
        if (!std::isfinite(mu) || !(mu > 0.0))
            throw EstimationError("fitted mean overflows at row " + std::to_string(k + 1));
        means[static_cast<std::size_t>(k)] = mu;
    }
    return means;
}

/// Poisson log-likelihood sum_k (y_k eta_k - exp(eta_k) - ln y_k!).
inline double poisson_glm_log_likelihood(std::span<const double> coefficients, const Eigen::MatrixXd& design,
                                         std::span<const std::int64_t> y) {
    double ll = 0.0;
    for (Eigen::Index k = 0; k < design.rows(); ++k) {
        double eta = 0.0;
        for (Eigen::Index c = 0; c < design.cols(); ++c) eta += design(k, c) * coefficients[static_cast<std::size_t>(c)];
        const auto yk = y[static_cast<std::size_t>(k)];
        ll += static_cast<double>(yk) * eta - std::exp(eta) - detail::log_factorial(yk);
    }
    return ll;
}

namespace detail {

inline double poisson_deviance(const Eigen::VectorXd& y, const Eigen::VectorXd& mu) {
    double dev = 0.0;
    for (Eigen::Index k = 0; k < y.size(); ++k) dev += xlogx_over(y(k), mu(k)) - (y(k) - mu(k));
    return 2.0 * dev;
}

}  // namespace detail

struct IrlsOptions {
    std::size_t max_iterations = 100;
    double relative_tolerance = 1e-10;
    std::size_t max_halvings = 30;
    double init_epsilon = 1e-8;
};

/// Poisson regression with log link by iteratively reweighted least squares.
inline FitResult poisson_glm_fit(const RegressionPairs& pairs, const DesignBuilder& builder,
                                 const IrlsOptions& options = {}) {
    const Eigen::MatrixXd X = builder.build(pairs.x);
    const Eigen::Index n = X.rows(), p = X.cols();
    if (n <= p)
        throw EstimationError("need more observations (" + std::to_string(n) + ") than coefficients (" +
                              std::to_string(p) + ")");
    {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
        if (qr.rank() < p) throw EstimationError("design matrix is rank deficient");
    }

    Eigen::VectorXd y(n);
    double y_sum = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        y(k) = static_cast<double>(pairs.y[static_cast<std::size_t>(k)]);
        y_sum += y(k);
    }
    if (y_sum <= 0.0) throw EstimationError("all responses are zero; the Poisson MLE does not exist");

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    beta(0) = std::log(y_sum / static_cast<double>(n) + options.init_epsilon);

    auto evaluate = [&](const Eigen::VectorXd& b, Eigen::VectorXd& mu) -> double {
        const Eigen::VectorXd eta = X * b;
        mu = eta.array().exp().matrix();
        for (Eigen::Index k = 0; k < n; ++k)
            if (!std::isfinite(eta(k)) || !std::isfinite(mu(k)) || mu(k) <= 0.0)
                return std::numeric_limits<double>::infinity();
        return detail::poisson_deviance(y, mu);
    };

    Eigen::VectorXd mu;
    double deviance = evaluate(beta, mu);
    FitResult fit;
    bool converged = false;
    std::size_t iter = 0;
    while (iter < options.max_iterations) {
        ++iter;
        // Newton step for the canonical link: (X' W X) delta = X' (y - mu), W = diag(mu).
        const Eigen::VectorXd sqrt_w = mu.array().sqrt().matrix();
        const Eigen::MatrixXd weighted = sqrt_w.asDiagonal() * X;
        const Eigen::VectorXd rhs = ((y - mu).array() / sqrt_w.array()).matrix();
        const Eigen::VectorXd step = weighted.colPivHouseholderQr().solve(rhs);
        if (!step.allFinite()) throw EstimationError("IRLS produced a non-finite step");

        Eigen::VectorXd candidate = beta + step;
        Eigen::VectorXd candidate_mu;
        double candidate_dev = evaluate(candidate, candidate_mu);
        std::size_t halvings = 0;
        // Accept rounding-level increases; halve on real ones.
        while (!(candidate_dev <= deviance + 1e-10 * (1.0 + deviance))) {
            if (++halvings > options.max_halvings)
                throw EstimationError("IRLS step halving exhausted");
            candidate = 0.5 * (beta + candidate);
            candidate_dev = evaluate(candidate, candidate_mu);
        }
        const double change = std::fabs(candidate_dev - deviance) / (std::fabs(candidate_dev) + 0.1);
        beta = std::move(candidate);
        mu = std::move(candidate_mu);
        deviance = candidate_dev;
        if (change < options.relative_tolerance) {
            converged = true;
            break;
        }
    }

    fit.params.values.assign(beta.data(), beta.data() + p);
    fit.log_likelihood = poisson_glm_log_likelihood(fit.params.values, X, pairs.y);
    fit.converged = converged && fit.params.all_finite();
    fit.iterations = iter;
    return fit;
}

/// Poisson regression family; design columns come from the builder applied
/// to the observed covariates.
class PoissonGlmModel {
public:
    explicit PoissonGlmModel(DesignBuilder builder, IrlsOptions options = {})
        : builder_(std::move(builder)), options_(options) {}

    /// Intercept plus x, ..., x^degree.
    static PoissonGlmModel polynomial(std::size_t degree) {
        return PoissonGlmModel(DesignBuilder::polynomial(degree));
    }

    std::string name() const { return "poisson-glm"; }
    const DesignBuilder& design_builder() const noexcept { return builder_; }

    FitResult estimate(const Dataset& data) const { return poisson_glm_fit(data.pairs(), builder_, options_); }

    std::vector<double> means(const ParamVector& params, const DesignInfo& design) const {
        if (!params.all_finite()) throw DataError("coefficients must be finite");
        return poisson_glm_fitted_means(params.values, builder_.build(design.covariates));
    }

    Dataset sample(const ParamVector& params, const DesignInfo& design, RandomStream& rng) const {
        const auto mu = means(params, design);
        RegressionPairs out{design.covariates, std::vector<std::int64_t>(mu.size())};
        for (std::size_t k = 0; k < mu.size(); ++k) out.y[k] = sample_poisson(mu[k], rng);
        return Dataset(std::move(out));
    }

    FittedDistribution fitted_distribution(const ParamVector& params, const DesignInfo& design) const {
        return FittedMeans{means(params, design)};
    }

private:
    DesignBuilder builder_;
    IrlsOptions options_;
};

}  // namespace gofmc
