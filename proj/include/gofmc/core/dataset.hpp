#pragma once

#include "gofmc/core/error.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace gofmc {

/// Bin counts of n categorical draws over m bins.
struct Counts {
    std::vector<std::int64_t> bins;

    std::size_t num_bins() const noexcept { return bins.size(); }
    std::int64_t total() const noexcept {
        return std::accumulate(bins.begin(), bins.end(), std::int64_t{0});
    }
    friend bool operator==(const Counts&, const Counts&) = default;
};

struct RealSamples {
    std::vector<double> values;
    friend bool operator==(const RealSamples&, const RealSamples&) = default;
};

/// (x_k, y_k) pairs; x is the scalar covariate, y a nonnegative count.
struct RegressionPairs {
    std::vector<double> x;
    std::vector<std::int64_t> y;
    friend bool operator==(const RegressionPairs&, const RegressionPairs&) = default;
};

enum class DataShape { Counts, RealSamples, RegressionPairs };

inline const char* to_string(DataShape shape) noexcept {
    switch (shape) {
        case DataShape::Counts: return "counts";
        case DataShape::RealSamples: return "real";
        case DataShape::RegressionPairs: return "pairs";
    }
    return "?";
}

class Dataset {
public:
    using Storage = std::variant<Counts, RealSamples, RegressionPairs>;

    Dataset(Counts c) : data_(std::move(c)) { validate(); }
    Dataset(RealSamples s) : data_(std::move(s)) { validate(); }
    Dataset(RegressionPairs p) : data_(std::move(p)) { validate(); }

    DataShape shape() const noexcept { return static_cast<DataShape>(data_.index()); }

    /// Number of observations: total count, sample size, or number of pairs.
    std::size_t size() const noexcept {
        return std::visit(
            [](const auto& d) -> std::size_t {
                using T = std::decay_t<decltype(d)>;
                if constexpr (std::is_same_v<T, Counts>) return static_cast<std::size_t>(d.total());
                else if constexpr (std::is_same_v<T, RealSamples>) return d.values.size();
                else return d.y.size();
            },
            data_);
    }

    const Counts& counts() const { return get<Counts>("counts"); }
    const RealSamples& samples() const { return get<RealSamples>("real samples"); }
    const RegressionPairs& pairs() const { return get<RegressionPairs>("regression pairs"); }

    const Storage& storage() const noexcept { return data_; }

    friend bool operator==(const Dataset&, const Dataset&) = default;

private:
    template <class T>
    const T& get(const char* what) const {
        if (const T* p = std::get_if<T>(&data_)) return *p;
        throw DataError(std::string("dataset does not hold ") + what + " (holds " +
                        to_string(shape()) + ")");
    }

    void validate() const {
        std::visit(
            [](const auto& d) {
                using T = std::decay_t<decltype(d)>;
                if constexpr (std::is_same_v<T, Counts>) {
                    if (d.bins.empty()) throw DataError("counts need at least one bin");
                    for (auto c : d.bins)
                        if (c < 0) throw DataError("bin counts must be nonnegative");
                    if (d.total() < 1) throw DataError("counts must total at least 1");
                } else if constexpr (std::is_same_v<T, RealSamples>) {
                    if (d.values.empty()) throw DataError("need at least one sample");
                    for (double v : d.values)
                        if (!std::isfinite(v)) throw DataError("samples must be finite");
                } else {
                    if (d.x.size() != d.y.size())
                        throw DataError("covariate and response lengths differ");
                    if (d.y.empty()) throw DataError("need at least one pair");
                    for (double v : d.x)
                        if (!std::isfinite(v)) throw DataError("covariates must be finite");
                    for (auto v : d.y)
                        if (v < 0) throw DataError("responses must be nonnegative");
                }
            },
            data_);
    }

    Storage data_;
};

/// Fixed information a sampler needs besides the parameters: the number of
/// observations and, for regression families, the covariates.
struct DesignInfo {
    std::size_t n = 0;
    std::vector<double> covariates;
};

inline DesignInfo design_of(const Dataset& data) {
    DesignInfo info{data.size(), {}};
    if (data.shape() == DataShape::RegressionPairs) info.covariates = data.pairs().x;
    return info;
}

}  // namespace gofmc
