#include "gofmc/cli/app.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

namespace {

void add_model_options(CLI::App& cmd, gofmc::cli::RunConfig& config) {
    cmd.add_option("--model", config.model.family, "zipf | sorted-zipf | poisson-glm | exponential")->required();
    cmd.add_option("--bins", config.model.bins, "number of bins (categorical models)");
    cmd.add_option("--degree", config.model.degree, "polynomial degree (poisson-glm)")->capture_default_str();
    cmd.add_option("--order", config.model.order, "hypothesized bin order for sorted-zipf, e.g. 1,2,3")->delimiter(',');
    cmd.add_option("--divergence", config.divergence, "chi2 | g2 | ks | kendall")->capture_default_str();
    cmd.add_option("--input", config.input, "dataset file")->required();
    cmd.add_option("--output", config.output, "output file (default stdout)");
}

}  // namespace

int main(int argc, char** argv) {
    using gofmc::cli::RunConfig;
    using gofmc::cli::Subcommand;

    CLI::App app{"Monte Carlo goodness-of-fit P-values with estimated nuisance parameters"};
    app.require_subcommand(1);

    RunConfig config;
    std::optional<std::uint64_t> seed;
    std::string format = "json";

    auto* test = app.add_subcommand("test", "P-value of the fitted model for one dataset");
    add_model_options(*test, config);
    test->add_option("--simulations", config.simulations, "number of Monte Carlo simulations")->capture_default_str();
    test->add_option("--seed", seed, "master seed (overrides GOFMC_SEED)");
    test->add_option("--threads", config.threads, "worker threads; does not change results")->capture_default_str();
    test->add_flag("--plus-one", config.plus_one, "also report (k+1)/(l+1)");
    test->add_option("--emit-divergences", config.emit_divergences, "TSV of simulated divergences");
    test->add_option("--format", format, "json | tsv")->check(CLI::IsMember({"json", "tsv"}))->capture_default_str();

    auto* calibrate = app.add_subcommand("calibrate", "distribution of P-values over replicated experiments");
    calibrate->add_option("--spec", config.spec_path, "calibration spec (JSON)");
    calibrate->add_option("--output", config.output, "summary JSON (default stdout)");
    calibrate->add_option("--pvalues", config.pvalues_path, "TSV with one P-value per line");
    calibrate->add_option("--seed", seed, "master seed when the spec has none (overrides GOFMC_SEED)");
    calibrate->add_option("--threads", config.threads, "worker threads; does not change results")->capture_default_str();

    auto* enumerate = app.add_subcommand("enumerate", "exact P-value by enumerating every outcome (small m, n)");
    add_model_options(*enumerate, config);

    CLI11_PARSE(app, argc, argv);

    if (test->parsed()) config.subcommand = Subcommand::Test;
    if (calibrate->parsed()) config.subcommand = Subcommand::Calibrate;
    if (enumerate->parsed()) config.subcommand = Subcommand::Enumerate;
    config.format = format == "tsv" ? gofmc::cli::OutputFormat::Tsv : gofmc::cli::OutputFormat::Json;
    if (config.threads < 1) config.threads = 1;

    try {
        config.seed = gofmc::cli::resolve_seed(seed);
    } catch (const gofmc::Error& e) {
        std::cerr << gofmc::cli::error_object(e.kind(), e.what());
        return 2;
    }
    return gofmc::cli::run(config, std::cout, std::cerr);
}
