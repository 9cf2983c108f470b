#pragma once

#include "gofmc/core/dataset.hpp"
#include "gofmc/core/error.hpp"
#include "gofmc/core/types.hpp"
#include "gofmc/models/sampling.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace gofmc {

/// Exponential lifetimes with the rate estimated by maximum likelihood
/// (rate-hat = n / sum x). A small real-valued family for the KS divergence.
class ExponentialModel {
public:
    std::string name() const { return "exponential"; }

    FitResult estimate(const Dataset& data) const {
        const auto& x = data.samples().values;
        double sum = 0.0;
        for (double v : x) {
            if (v < 0.0) throw DataError("exponential samples must be nonnegative");
            sum += v;
        }
        if (!(sum > 0.0)) throw EstimationError("all samples are zero; the rate MLE does not exist");
        const double n = static_cast<double>(x.size());
        const double rate = n / sum;
        FitResult fit;
        fit.params.values = {rate};
        fit.log_likelihood = n * std::log(rate) - rate * sum;
        fit.converged = true;
        fit.iterations = 1;
        return fit;
    }

    Dataset sample(const ParamVector& params, const DesignInfo& design, RandomStream& rng) const {
        const double rate = checked_rate(params);
        RealSamples out;
        out.values.reserve(design.n);
        for (std::size_t i = 0; i < design.n; ++i) out.values.push_back(sample_exponential(rate, rng));
        return Dataset(std::move(out));
    }

    FittedDistribution fitted_distribution(const ParamVector& params, const DesignInfo&) const {
        const double rate = checked_rate(params);
        return CumulativeDistribution{[rate](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-rate * x); }};
    }

private:
    static double checked_rate(const ParamVector& params) {
        if (params.size() != 1 || !(params[0] > 0.0) || !std::isfinite(params[0]))
            throw DataError("exponential rate must be a single positive number");
        return params[0];
    }
};

}  // namespace gofmc
