#include "support/test_families.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace gofmc;

namespace {

// Concave 1-D maximizer by grid search: step 1e-3 over [lo, hi], then
// step 1e-6 around the best coarse point.
template <class F>
double grid_argmax(F f, double lo, double hi) {
    double best = lo, best_v = f(lo);
    for (double t = lo; t <= hi + 1e-12; t += 1e-3) {
        const double v = f(t);
        if (v > best_v) best_v = v, best = t;
    }
    const double a = std::max(lo, best - 2e-3), b = std::min(hi, best + 2e-3);
    for (int i = 0; i <= 4000; ++i) {
        const double t = std::min(b, a + i * 1e-6);
        const double v = f(t);
        if (v > best_v) best_v = v, best = t;
    }
    return best;
}

double finite_difference_score_norm(const std::vector<double>& beta, const Eigen::MatrixXd& X,
                                    const std::vector<std::int64_t>& y) {
    double norm2 = 0.0;
    for (std::size_t c = 0; c < beta.size(); ++c) {
        const double h = 1e-6 * std::max(1.0, std::fabs(beta[c]));
        auto plus = beta, minus = beta;
        plus[c] += h;
        minus[c] -= h;
        const double g = (poisson_glm_log_likelihood(plus, X, y) - poisson_glm_log_likelihood(minus, X, y)) / (2 * h);
        norm2 += g * g;
    }
    return std::sqrt(norm2);
}

}  // namespace

TEST_CASE("zipf_pmf", "[zipf]") {
    REQUIRE(zipf_pmf(0.0, 4) == std::vector<double>{0.25, 0.25, 0.25, 0.25});
    const auto p = zipf_pmf(1.0, 2);
    REQUIRE(p[0] == Catch::Approx(2.0 / 3.0).epsilon(1e-15));
    REQUIRE(p[1] == Catch::Approx(1.0 / 3.0).epsilon(1e-15));
    for (double theta : {0.1, 1.0, 2.5, 13.0, 50.0})
        for (std::size_t m : {2u, 3u, 10u, 57u}) {
            const auto q = zipf_pmf(theta, m);
            REQUIRE(std::fabs(std::accumulate(q.begin(), q.end(), 0.0) - 1.0) < 1e-12);
            for (std::size_t j = 1; j < m; ++j) REQUIRE(q[j] < q[j - 1]);
        }
    REQUIRE_THROWS_AS(zipf_pmf(-0.1, 3), DataError);
    REQUIRE_THROWS_AS(zipf_pmf(1.0, 1), DataError);
}

TEST_CASE("zipf_mle boundaries", "[zipf]") {
    const std::vector<std::int64_t> uniform{7, 7, 7, 7};
    const auto fit = zipf_mle(uniform);
    REQUIRE(fit.params[0] == 0.0);
    REQUIRE(fit.at_boundary);

    const std::vector<std::int64_t> all_first{9, 0, 0};
    const auto top = zipf_mle(all_first);
    REQUIRE(top.params[0] == kZipfThetaMax);
    REQUIRE(top.at_boundary);

    // Counts tilted toward high bins: likelihood peaks at theta = 0.
    const std::vector<std::int64_t> rising{1, 2, 9};
    REQUIRE(zipf_mle(rising).params[0] == 0.0);
}

TEST_CASE("zipf_mle (3,1) over two bins matches grid search", "[zipf][oracle]") {
    const std::vector<std::int64_t> counts{3, 1};
    const double grid = grid_argmax([&](double t) { return zipf_log_likelihood(t, counts); }, 0.0, 10.0);
    const auto fit = zipf_mle(counts);
    REQUIRE_FALSE(fit.at_boundary);
    REQUIRE(std::fabs(fit.params[0] - grid) < 1e-5);
    // Score equation E[ln J] = (1/4) ln 2, i.e. p_2 = 1/4, theta = ln 3 / ln 2.
    REQUIRE(fit.params[0] == Catch::Approx(std::log(3.0) / std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("zipf_mle is consistent on large samples", "[zipf]") {
    const ZipfModel model(10);
    RandomStream rng(17, 0);
    const Dataset data = model.sample({{1.3}, std::nullopt}, {100000, {}}, rng);
    const auto fit = model.estimate(data);
    REQUIRE(std::fabs(fit.params[0] - 1.3) < 0.1);
    REQUIRE(std::fabs(fit.params[0] - 1.3) < 0.02);
}

TEST_CASE("zipf score vanishes at interior estimates", "[zipf][property]") {
    RandomStream rng(3, 1);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t m = 2 + trial % 9;
        const double theta = 3.0 * rng.uniform();
        const Dataset data = ZipfModel(m).sample({{theta}, std::nullopt}, {20 + 30 * std::size_t(trial), {}}, rng);
        const auto& c = data.counts().bins;
        const auto fit = zipf_mle(c);
        REQUIRE(fit.converged);
        if (fit.at_boundary) continue;
        const double t = fit.params[0], h = 1e-6;
        const double score = (zipf_log_likelihood(t + h, c) - zipf_log_likelihood(t - h, c)) / (2 * h);
        REQUIRE(std::fabs(score) < 1e-6 * std::max(1.0, double(data.size()) / 100.0));
    }
}

TEST_CASE("sorted_zipf_mle", "[sorted-zipf]") {
    const std::vector<std::int64_t> descending{9, 5, 2, 1};
    REQUIRE(*sorted_zipf_mle(descending).params.permutation == Permutation::identity(4));

    const std::vector<std::int64_t> mixed{1, 5, 3};
    const auto fit = sorted_zipf_mle(mixed);
    REQUIRE(fit.params.permutation->values() == std::vector<std::size_t>{3, 1, 2});

    const std::vector<std::int64_t> flat{4, 4, 4};
    const auto tie = sorted_zipf_mle(flat);
    REQUIRE(*tie.params.permutation == Permutation::identity(3));
    REQUIRE(tie.params[0] == 0.0);
}

TEST_CASE("sorted-Zipf rank order maximizes the joint likelihood", "[sorted-zipf][oracle]") {
    const std::vector<std::vector<std::int64_t>> cases{{1, 5, 3}, {2, 0, 7, 4}, {3, 3, 1, 6}, {0, 1, 8, 2}};
    for (const auto& counts : cases) {
        const auto fit = sorted_zipf_mle(counts);
        const double theta = fit.params[0];
        auto loglik = [&](const std::vector<std::size_t>& order, double t) {
            const auto p = sorted_zipf_pmf(t, Permutation(order));
            double ll = 0.0;
            for (std::size_t j = 0; j < counts.size(); ++j)
                if (counts[j] > 0) ll += counts[j] * std::log(p[j]);
            return ll;
        };
        std::vector<std::size_t> order(counts.size());
        std::iota(order.begin(), order.end(), std::size_t{1});
        double best = -1e300;
        do {
            // profile each permutation over theta
            const double t = grid_argmax([&](double s) { return loglik(order, s); }, 0.0, 8.0);
            best = std::max(best, loglik(order, t));
        } while (std::next_permutation(order.begin(), order.end()));
        REQUIRE(loglik(fit.params.permutation->values(), theta) >= best - 1e-9);
        REQUIRE(std::fabs(fit.log_likelihood - loglik(fit.params.permutation->values(), theta)) < 1e-9);
    }
}

TEST_CASE("sorted-Zipf relabeling equivariance", "[sorted-zipf][property]") {
    RandomStream rng(21, 0);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t m = 3 + trial % 6;
        std::vector<std::int64_t> counts(m);
        // distinct counts so tie-breaking plays no role
        std::vector<std::int64_t> pool(40);
        std::iota(pool.begin(), pool.end(), 0);
        for (std::size_t j = 0; j < m; ++j) {
            const std::size_t pick = j + static_cast<std::size_t>(rng.uniform() * double(pool.size() - j));
            std::swap(pool[j], pool[pick]);
            counts[j] = pool[j];
        }
        if (std::accumulate(counts.begin(), counts.end(), std::int64_t{0}) == 0) continue;

        std::vector<std::size_t> sigma_values(m);
        std::iota(sigma_values.begin(), sigma_values.end(), std::size_t{1});
        for (std::size_t j = m - 1; j > 0; --j)
            std::swap(sigma_values[j], sigma_values[static_cast<std::size_t>(rng.uniform() * double(j + 1))]);
        const Permutation sigma(sigma_values);

        // bin j of the relabeled data is bin sigma^{-1}(j) of the original
        std::vector<std::int64_t> moved(m);
        for (std::size_t j = 1; j <= m; ++j) moved[sigma(j) - 1] = counts[j - 1];

        const auto original = sorted_zipf_mle(counts);
        const auto relabeled = sorted_zipf_mle(moved);
        REQUIRE(*relabeled.params.permutation == original.params.permutation->compose(sigma.inverse()));
        REQUIRE(relabeled.params[0] == original.params[0]);
    }
}

TEST_CASE("sorted-Zipf model samples under the hypothesized order", "[sorted-zipf]") {
    const SortedZipfModel model(3, Permutation({3, 2, 1}));
    const auto pmf = model.sampling_pmf({{1.0}, std::nullopt});
    REQUIRE(pmf[2] > pmf[1]);
    REQUIRE(pmf[1] > pmf[0]);
    const auto fitted = std::get<ProbabilityMass>(model.fitted_distribution(
        {{1.0}, Permutation::identity(3)}, {10, {}}));
    REQUIRE(fitted.pmf[0] > fitted.pmf[2]);
    REQUIRE(*fitted.hypothesized_order == Permutation({3, 2, 1}));
    REQUIRE(std::fabs(std::accumulate(pmf.begin(), pmf.end(), 0.0) - 1.0) < 1e-12);
}

TEST_CASE("poisson_glm_fitted_means", "[glm]") {
    const auto builder = DesignBuilder::polynomial(3);
    const std::vector<double> x{1.0, 2.0, 3.0};
    const auto X = builder.build(x);
    REQUIRE(poisson_glm_fitted_means(std::vector<double>{0, 0, 0, 0}, X) == std::vector<double>{1, 1, 1});
    for (double mu : poisson_glm_fitted_means(std::vector<double>{std::log(3.0), 0, 0, 0}, X))
        REQUIRE(mu == Catch::Approx(3.0).epsilon(1e-15));
    const auto cubic = poisson_glm_fitted_means(std::vector<double>{0, 1, 0, 0}, X);
    for (std::size_t k = 0; k < 3; ++k) REQUIRE(cubic[k] == Catch::Approx(std::exp(double(k + 1))).epsilon(1e-15));

    try {
        poisson_glm_fitted_means(std::vector<double>{0, 0, 0, 400}, X);
        FAIL("expected overflow");
    } catch (const EstimationError& e) {
        REQUIRE(std::string(e.what()).find("row 2") != std::string::npos);
    }
}

TEST_CASE("poisson_glm_fit intercept only", "[glm]") {
    const RegressionPairs pairs{{0.0, 1.0, 2.0}, {2, 2, 2}};
    const auto fit = poisson_glm_fit(pairs, DesignBuilder::polynomial(0));
    REQUIRE(fit.converged);
    REQUIRE(std::fabs(fit.params[0] - std::log(2.0)) < 1e-10);
    const Eigen::MatrixXd X = DesignBuilder::polynomial(0).build(pairs.x);
    const double grid = grid_argmax(
        [&](double b) { return poisson_glm_log_likelihood(std::vector<double>{b}, X, pairs.y); }, -1.0, 3.0);
    REQUIRE(std::fabs(fit.params[0] - grid) < 2e-6);
}

TEST_CASE("poisson_glm_fit reproduces exact log-linear data", "[glm]") {
    // y = 2^(1 + x) on x = 0..4: a = b = ln 2.
    const RegressionPairs pairs{{0, 1, 2, 3, 4}, {2, 4, 8, 16, 32}};
    const auto model = PoissonGlmModel::polynomial(1);
    const auto fit = model.estimate(Dataset(pairs));
    REQUIRE(fit.converged);
    REQUIRE(fit.params[0] == Catch::Approx(std::log(2.0)).epsilon(1e-9));
    REQUIRE(fit.params[1] == Catch::Approx(std::log(2.0)).epsilon(1e-9));
    const auto mu = model.means(fit.params, {5, pairs.x});
    for (std::size_t k = 0; k < 5; ++k) REQUIRE(std::fabs(mu[k] - double(pairs.y[k])) < 1e-8);
    REQUIRE(std::fabs(deviance_g2(pairs.y, mu)) < 1e-8);
}

TEST_CASE("poisson_glm_fit satisfies the score equations", "[glm][property]") {
    RandomStream rng(77, 0);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t degree = trial % 4;
        const std::size_t n = 30 + 10 * std::size_t(trial);
        std::vector<double> truth{1.0 + rng.uniform(), 0.4 * (rng.uniform() - 0.5), 0.1 * (rng.uniform() - 0.5),
                                  0.05 * (rng.uniform() - 0.5)};
        truth.resize(degree + 1);
        const auto model = PoissonGlmModel::polynomial(degree);
        const DesignInfo design{n, gofmc::testing::grid(n, -2.0, 2.0)};
        const Dataset data = model.sample({truth, std::nullopt}, design, rng);
        const auto fit = model.estimate(data);
        REQUIRE(fit.converged);
        const auto X = model.design_builder().build(design.covariates);
        REQUIRE(finite_difference_score_norm(fit.params.values, X, data.pairs().y) < 1e-6);
        const auto mu = model.means(fit.params, design);
        const double y_sum = std::accumulate(data.pairs().y.begin(), data.pairs().y.end(), 0.0);
        REQUIRE(std::fabs(std::accumulate(mu.begin(), mu.end(), 0.0) - y_sum) < 1e-8 * y_sum);
    }
}

TEST_CASE("poisson_glm_fit error paths", "[glm]") {
    REQUIRE_THROWS_AS(poisson_glm_fit({{1, 1, 1, 1}, {1, 2, 3, 4}}, DesignBuilder::polynomial(1)), EstimationError);
    REQUIRE_THROWS_AS(poisson_glm_fit({{1, 2}, {1, 2}}, DesignBuilder::polynomial(1)), EstimationError);
    REQUIRE_THROWS_AS(poisson_glm_fit({{1, 2, 3}, {0, 0, 0}}, DesignBuilder::polynomial(1)), EstimationError);
}

TEST_CASE("categorical sampler frequencies", "[sampling]") {
    RandomStream rng(1, 0);
    const std::size_t n = 1000000;
    const auto counts = sample_categorical_counts(zipf_pmf(0.0, 4), n, rng);
    const double sigma = std::sqrt(n * 0.25 * 0.75);
    for (auto c : counts) REQUIRE(std::fabs(double(c) - 0.25 * n) < 4 * sigma);
}

TEST_CASE("poisson sampler", "[sampling]") {
    RandomStream rng(2, 0);
    for (int i = 0; i < 1000; ++i) REQUIRE(sample_poisson(1e-12, rng) == 0);

    for (double mean : {4.0, 37.5}) {
        const std::size_t n = 100000;
        double sum = 0.0, sum2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double v = double(sample_poisson(mean, rng));
            sum += v;
            sum2 += v * v;
        }
        const double avg = sum / n;
        REQUIRE(std::fabs(avg - mean) < 4 * std::sqrt(mean / n));
        const double var = sum2 / n - avg * avg;
        REQUIRE(std::fabs(var - mean) < 0.05 * mean);
    }
}

TEST_CASE("exponential family", "[exponential]") {
    const ExponentialModel model;
    RandomStream rng(9, 0);
    const Dataset data = model.sample({{2.5}, std::nullopt}, {50000, {}}, rng);
    const auto fit = model.estimate(data);
    REQUIRE(std::fabs(fit.params[0] - 2.5) < 0.05);
    const auto cdf = std::get<CumulativeDistribution>(model.fitted_distribution(fit.params, {})).cdf;
    REQUIRE(cdf(-1.0) == 0.0);
    REQUIRE(cdf(1e9) == 1.0);
    REQUIRE(cdf(0.1) < cdf(0.2));
    REQUIRE_THROWS_AS(model.estimate(Dataset(RealSamples{{0.0, 0.0}})), EstimationError);
}
