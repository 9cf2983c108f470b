#pragma once

// Runtime front end shared by the gofmc binary and its tests: maps names to
// model families and divergences, runs the three subcommands, and writes
// JSON/TSV outputs.

#include "gofmc/calibration.hpp"
#include "gofmc/cli/io.hpp"
#include "gofmc/cli/json_writer.hpp"
#include "gofmc/core/engine.hpp"
#include "gofmc/core/enumeration.hpp"
#include "gofmc/divergences.hpp"
#include "gofmc/models/exponential.hpp"
#include "gofmc/models/poisson_glm.hpp"
#include "gofmc/models/sorted_zipf.hpp"
#include "gofmc/models/zipf.hpp"

#include <json.hpp>

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace gofmc::cli {

enum class Subcommand { Test, Calibrate, Enumerate };
enum class OutputFormat { Json, Tsv };

struct ModelSpec {
    std::string family = "zipf";
    std::size_t bins = 0;
    std::size_t degree = 3;
    /// Hypothesized bin order for sorted-zipf (1-based); identity if empty.
    std::vector<std::size_t> order;
};

struct RunConfig {
    Subcommand subcommand = Subcommand::Test;
    ModelSpec model;
    std::string divergence = "chi2";
    std::size_t simulations = 1000;
    std::uint64_t seed = kDefaultSeed;
    unsigned threads = 1;
    bool plus_one = false;
    std::string input;
    std::string output;
    OutputFormat format = OutputFormat::Json;
    std::string emit_divergences;
    std::string spec_path;
    std::string pvalues_path;
};

/// Seed precedence: explicit flag, then GOFMC_SEED, then kDefaultSeed.
inline std::uint64_t resolve_seed(std::optional<std::uint64_t> flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("GOFMC_SEED")) {
        const std::string_view text(env);
        std::uint64_t v = 0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
            throw ConfigError("GOFMC_SEED is not an unsigned integer: '" + std::string(text) + "'");
        return v;
    }
    return kDefaultSeed;
}

using AnyModel = std::variant<ZipfModel, SortedZipfModel, PoissonGlmModel, ExponentialModel>;
using AnyDivergence = std::variant<ChiSquare, Deviance, KolmogorovSmirnov, KendallTau>;

inline DataShape model_shape(const std::string& family) {
    if (family == "zipf" || family == "sorted-zipf") return DataShape::Counts;
    if (family == "poisson-glm") return DataShape::RegressionPairs;
    if (family == "exponential") return DataShape::RealSamples;
    throw ConfigError("unknown model '" + family + "' (expected zipf, sorted-zipf, poisson-glm, exponential)");
}

inline AnyModel make_model(const ModelSpec& spec) {
    const DataShape shape = model_shape(spec.family);
    if (shape == DataShape::Counts && spec.bins < 2) throw ConfigError(spec.family + " needs --bins >= 2");
    if (spec.family == "zipf") return ZipfModel(spec.bins);
    if (spec.family == "sorted-zipf") {
        std::optional<Permutation> order;
        if (!spec.order.empty()) {
            if (spec.order.size() != spec.bins) throw ConfigError("--order must list every bin");
            try {
                order = Permutation(spec.order);
            } catch (const DataError& e) {
                throw ConfigError(std::string("--order: ") + e.what());
            }
        }
        return SortedZipfModel(spec.bins, order);
    }
    if (spec.family == "poisson-glm") return PoissonGlmModel::polynomial(spec.degree);
    return ExponentialModel{};
}

inline AnyDivergence make_divergence(const std::string& name) {
    if (name == "chi2") return ChiSquare{};
    if (name == "g2") return Deviance{};
    if (name == "ks") return KolmogorovSmirnov{};
    if (name == "kendall") return KendallTau{};
    throw ConfigError("unknown divergence '" + name + "' (expected chi2, g2, ks, kendall)");
}

inline void check_compatible(const ModelSpec& model, const std::string& divergence_name) {
    const DataShape shape = model_shape(model.family);
    const DataShape wanted = std::visit([](const auto& d) { return d.shape(); }, make_divergence(divergence_name));
    if (shape != wanted)
        throw ConfigError("divergence '" + divergence_name + "' needs " + to_string(wanted) + " data but model '" +
                          model.family + "' uses " + to_string(shape));
    if (divergence_name == "kendall" && model.family != "sorted-zipf")
        throw ConfigError("divergence 'kendall' needs the sorted-zipf model");
}

inline std::string model_label(const ModelSpec& spec) {
    if (spec.family == "poisson-glm") return spec.family + "(degree=" + std::to_string(spec.degree) + ")";
    if (spec.family == "exponential") return spec.family;
    return spec.family + "(bins=" + std::to_string(spec.bins) + ")";
}

inline void write_text(const std::string& path, const std::string& text, std::ostream& fallback) {
    if (path.empty() || path == "-") {
        fallback << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << text;
}

inline void add_params(JsonObject& json, const ParamVector& params, const char* values_key, const char* order_key) {
    json.add(values_key, params.values);
    if (params.permutation) json.add(order_key, params.permutation->values());
}

inline std::string format_test_report(const RunConfig& config, const PValueReport& report) {
    if (config.format == OutputFormat::Tsv) {
        std::string s = "key\tvalue\n";
        s += "p_value\t" + format_real(report.p_hat) + "\n";
        s += "std_error\t" + format_real(report.std_error) + "\n";
        s += "observed_divergence\t" + format_real(report.observed_divergence) + "\n";
        s += "num_simulations\t" + std::to_string(report.num_simulations) + "\n";
        s += "exceed_count\t" + std::to_string(report.exceed_count) + "\n";
        s += "excluded_replicates\t" + std::to_string(report.excluded_replicates) + "\n";
        for (std::size_t i = 0; i < report.theta_hat.size(); ++i)
            s += "theta_hat[" + std::to_string(i) + "]\t" + format_real(report.theta_hat[i]) + "\n";
        if (report.theta_hat.permutation)
            for (std::size_t j = 1; j <= report.theta_hat.permutation->size(); ++j)
                s += "phi_hat[" + std::to_string(j - 1) + "]\t" + std::to_string((*report.theta_hat.permutation)(j)) + "\n";
        if (report.p_plus_one) s += "p_value_plus_one\t" + format_real(*report.p_plus_one) + "\n";
        s += "seed\t" + std::to_string(report.seed) + "\n";
        s += "model\t" + model_label(config.model) + "\n";
        s += "divergence\t" + config.divergence + "\n";
        return s;
    }
    JsonObject json;
    json.add("p_value", report.p_hat)
        .add("std_error", report.std_error)
        .add("observed_divergence", report.observed_divergence)
        .add("num_simulations", report.num_simulations)
        .add("exceed_count", report.exceed_count)
        .add("excluded_replicates", report.excluded_replicates);
    add_params(json, report.theta_hat, "theta_hat", "phi_hat");
    if (report.p_plus_one) json.add("p_value_plus_one", *report.p_plus_one);
    json.add("seed", report.seed).add("model", model_label(config.model)).add("divergence", config.divergence);
    return json.str() + "\n";
}

inline std::string format_divergences_tsv(const PValueReport& report) {
    std::string s = "simulation\tdivergence\n";
    for (std::size_t i = 0; i < report.simulated_divergences.size(); ++i)
        if (const auto& d = report.simulated_divergences[i]) s += std::to_string(i) + "\t" + format_real(*d) + "\n";
    return s;
}

inline void run_test(const RunConfig& config, std::ostream& out) {
    if (config.simulations < 1) throw ConfigError("--simulations must be >= 1");
    check_compatible(config.model, config.divergence);
    if (config.input.empty()) throw ConfigError("--input is required");
    const Dataset data = ingest_dataset(config.input, model_shape(config.model.family));

    SimulationOptions options;
    options.simulations = config.simulations;
    options.seed = config.seed;
    options.threads = config.threads;
    options.plus_one = config.plus_one;
    options.keep_divergences = !config.emit_divergences.empty();

    const PValueReport report = std::visit(
        [&](const auto& model, const auto& divergence) { return estimate_p_value(model, divergence, data, options); },
        make_model(config.model), make_divergence(config.divergence));

    write_text(config.output, format_test_report(config, report), out);
    if (!config.emit_divergences.empty()) write_text(config.emit_divergences, format_divergences_tsv(report), out);
}

inline void run_enumerate(const RunConfig& config, std::ostream& out) {
    check_compatible(config.model, config.divergence);
    if (config.input.empty()) throw ConfigError("--input is required");
    const Dataset data = ingest_dataset(config.input, model_shape(config.model.family));
    const ExactPValue exact = std::visit(
        [&](const auto& model, const auto& divergence) -> ExactPValue {
            if constexpr (CountsModelFamily<std::decay_t<decltype(model)>>)
                return exact_p_value_enumeration(model, divergence, data);
            else
                throw ConfigError("enumerate supports categorical models only");
        },
        make_model(config.model), make_divergence(config.divergence));

    JsonObject json;
    json.add("exact_p_value", exact.p_value).add("observed_divergence", exact.observed_divergence);
    add_params(json, exact.theta_hat, "theta_hat", "phi_hat");
    json.add("outcomes", exact.outcomes).add("model", model_label(config.model)).add("divergence", config.divergence);
    write_text(config.output, json.str() + "\n", out);
}

/// Calibration settings read from the --spec file. Missing keys fall back
/// to the desk-scale default (Zipf, m=10, theta=1.3, n=500, l=400, R=400).
struct CalibrationConfig {
    ModelSpec generating{"zipf", 10, 3, {}};
    std::vector<double> true_params{1.3};
    ModelSpec tested{"zipf", 10, 3, {}};
    std::string divergence = "chi2";
    std::size_t n = 500;
    std::size_t simulations = 400;
    std::size_t replications = 400;
    std::optional<std::uint64_t> seed;
    double x_min = -2.0;
    double x_max = 2.0;
};

inline ModelSpec parse_model_spec(const nlohmann::json& j, const ModelSpec& fallback) {
    ModelSpec spec = fallback;
    if (j.contains("model")) spec.family = j.at("model").get<std::string>();
    if (j.contains("bins")) spec.bins = j.at("bins").get<std::size_t>();
    if (j.contains("degree")) spec.degree = j.at("degree").get<std::size_t>();
    if (j.contains("order")) spec.order = j.at("order").get<std::vector<std::size_t>>();
    return spec;
}

inline CalibrationConfig parse_calibration_config(std::string_view text) {
    CalibrationConfig c;
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("calibration spec is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("calibration spec must be a JSON object");
    auto count = [&](const char* key, std::size_t& dst) {
        if (!j.contains(key)) return;
        const auto& v = j.at(key);
        if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
            throw ConfigError(std::string("'") + key + "' must be a nonnegative integer");
        dst = v.get<std::size_t>();
    };
    try {
        if (j.contains("generating")) {
            c.generating = parse_model_spec(j.at("generating"), c.generating);
            if (j.at("generating").contains("theta"))
                c.true_params = j.at("generating").at("theta").get<std::vector<double>>();
            c.tested = c.generating;
            c.tested.order.clear();
        }
        if (j.contains("tested")) c.tested = parse_model_spec(j.at("tested"), c.tested);
        if (j.contains("divergence")) c.divergence = j.at("divergence").get<std::string>();
        count("n", c.n);
        count("simulations", c.simulations);
        count("replications", c.replications);
        if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("x_range")) {
            const auto r = j.at("x_range").get<std::vector<double>>();
            if (r.size() != 2 || !(r[0] < r[1])) throw ConfigError("'x_range' must be [min, max] with min < max");
            c.x_min = r[0];
            c.x_max = r[1];
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("calibration spec: ") + e.what());
    }
    if (c.replications < 1) throw ConfigError("'replications' must be >= 1");
    if (c.simulations < 1) throw ConfigError("'simulations' must be >= 1");
    if (c.n < 1) throw ConfigError("'n' must be >= 1");
    if (model_shape(c.generating.family) != model_shape(c.tested.family))
        throw ConfigError("generating and tested models produce different data shapes");
    check_compatible(c.tested, c.divergence);
    return c;
}

/// n equally spaced covariates on [x_min, x_max] (empty for families without covariates).
inline DesignInfo calibration_design(const CalibrationConfig& c) {
    DesignInfo design{c.n, {}};
    if (model_shape(c.generating.family) == DataShape::RegressionPairs) {
        design.covariates.resize(c.n);
        for (std::size_t k = 0; k < c.n; ++k)
            design.covariates[k] =
                c.n == 1 ? c.x_min : c.x_min + (c.x_max - c.x_min) * static_cast<double>(k) / static_cast<double>(c.n - 1);
    }
    return design;
}

inline void run_calibrate(const RunConfig& config, std::ostream& out) {
    CalibrationConfig c = config.spec_path.empty() ? CalibrationConfig{} : parse_calibration_config(read_file(config.spec_path));
    const std::uint64_t seed = c.seed.value_or(config.seed);
    const DesignInfo design = calibration_design(c);
    ParamVector truth{c.true_params, std::nullopt};

    const CalibrationSummary summary = std::visit(
        [&](const auto& generating, const auto& tested, const auto& divergence) {
            using G = std::decay_t<decltype(generating)>;
            using T = std::decay_t<decltype(tested)>;
            using D = std::decay_t<decltype(divergence)>;
            CalibrationSpec<G, T, D> spec{generating, truth, design, tested, divergence,
                                          c.simulations, c.replications, seed, config.threads};
            return run_calibration(spec);
        },
        make_model(c.generating), make_model(c.tested), make_divergence(c.divergence));

    JsonObject rates;
    rates.add("0.01", summary.rejection_rates[0]).add("0.05", summary.rejection_rates[1]).add("0.10", summary.rejection_rates[2]);
    JsonObject json;
    json.add("replications", c.replications)
        .add("num_simulations", c.simulations)
        .add("n", c.n)
        .add("ks_distance", summary.ks_distance)
        .add("rejection_rates", rates)
        .add("excluded_replicates", summary.excluded_replicates)
        .add("generating_model", model_label(c.generating))
        .add("true_params", c.true_params)
        .add("tested_model", model_label(c.tested))
        .add("divergence", c.divergence)
        .add("seed", seed);
    write_text(config.output, json.str() + "\n", out);

    if (!config.pvalues_path.empty()) {
        std::string tsv;
        for (double p : summary.p_values) tsv += format_real(p) + "\n";
        write_text(config.pvalues_path, tsv, out);
    }
}

inline std::string error_object(const char* kind, const std::string& message) {
    JsonObject inner;
    inner.add("kind", kind).add("message", message);
    JsonObject outer;
    outer.add("error", inner);
    return outer.str() + "\n";
}

/// Runs a subcommand. Returns 0 on success (whatever the P-value), 2 for
/// configuration errors and 1 for everything else; failures print a JSON
/// error object on `err`.
inline int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        switch (config.subcommand) {
            case Subcommand::Test: run_test(config, out); break;
            case Subcommand::Calibrate: run_calibrate(config, out); break;
            case Subcommand::Enumerate: run_enumerate(config, out); break;
        }
        return 0;
    } catch (const ConfigError& e) {
        err << error_object(e.kind(), e.what());
        return 2;
    } catch (const Error& e) {
        err << error_object(e.kind(), e.what());
        return 1;
    } catch (const std::exception& e) {
        err << error_object("internal", e.what());
        return 1;
    }
}

}  // namespace gofmc::cli
