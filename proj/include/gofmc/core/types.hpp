#pragma once

#include "gofmc/core/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace gofmc {

/// A bijection on {1, ..., m}, stored as phi[j-1] = phi(j).
class Permutation {
public:
    explicit Permutation(std::vector<std::size_t> values) : values_(std::move(values)) {
        std::vector<bool> seen(values_.size(), false);
        for (std::size_t v : values_) {
            if (v < 1 || v > values_.size() || seen[v - 1])
                throw DataError("not a permutation of 1..m");
            seen[v - 1] = true;
        }
    }

    static Permutation identity(std::size_t m) {
        std::vector<std::size_t> v(m);
        for (std::size_t j = 0; j < m; ++j) v[j] = j + 1;
        return Permutation(std::move(v));
    }

    std::size_t size() const noexcept { return values_.size(); }
    /// phi(j) for 1-based j.
    std::size_t operator()(std::size_t j) const { return values_.at(j - 1); }
    const std::vector<std::size_t>& values() const noexcept { return values_; }

    Permutation inverse() const {
        std::vector<std::size_t> inv(values_.size());
        for (std::size_t j = 0; j < values_.size(); ++j) inv[values_[j] - 1] = j + 1;
        return Permutation(std::move(inv));
    }

    /// (this o other)(j) = this(other(j)).
    Permutation compose(const Permutation& other) const {
        if (other.size() != size()) throw DataError("permutation sizes differ");
        std::vector<std::size_t> out(size());
        for (std::size_t j = 0; j < size(); ++j) out[j] = values_[other.values_[j] - 1];
        return Permutation(std::move(out));
    }

    friend bool operator==(const Permutation&, const Permutation&) = default;

private:
    std::vector<std::size_t> values_;
};

struct ParamVector {
    std::vector<double> values;
    std::optional<Permutation> permutation;

    double operator[](std::size_t i) const { return values.at(i); }
    std::size_t size() const noexcept { return values.size(); }
    bool all_finite() const noexcept {
        return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
    }
    friend bool operator==(const ParamVector&, const ParamVector&) = default;
};

struct FitResult {
    ParamVector params;
    double log_likelihood = 0.0;
    bool converged = false;
    std::size_t iterations = 0;
    bool at_boundary = false;

    /// Estimates the engine may use: converged, or pinned at a boundary.
    bool usable() const noexcept { return converged || at_boundary; }
};

/// Categorical model probabilities. The ranking fields are filled by
/// families with a permutation parameter so that ranking divergences can
/// compare the estimated order with the hypothesized one.
struct ProbabilityMass {
    std::vector<double> pmf;
    std::optional<Permutation> estimated_order;
    std::optional<Permutation> hypothesized_order;
};

struct CumulativeDistribution {
    std::function<double(double)> cdf;
};

/// Per-observation Poisson means of a fitted regression.
struct FittedMeans {
    std::vector<double> means;
};

using FittedDistribution = std::variant<ProbabilityMass, CumulativeDistribution, FittedMeans>;

}  // namespace gofmc
