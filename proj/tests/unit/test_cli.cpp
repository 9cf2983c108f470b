#include "gofmc/cli/app.hpp"
#include "support/test_families.hpp"

#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <sstream>

using namespace gofmc;
using namespace gofmc::cli;
using nlohmann::json;

namespace {

const std::string kData = GOFMC_TEST_DATA_DIR;

std::filesystem::path scratch(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "gofmc_test_cli";
    std::filesystem::create_directories(dir);
    return dir / name;
}

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome invoke(const RunConfig& config) {
    std::ostringstream out, err;
    const int code = run(config, out, err);
    return {code, out.str(), err.str()};
}

RunConfig zipf_test_config() {
    RunConfig c;
    c.subcommand = Subcommand::Test;
    c.model = {"zipf", 10, 3, {}};
    c.divergence = "chi2";
    c.simulations = 500;
    c.seed = 7;
    c.input = kData + "/zipf_counts.txt";
    return c;
}

}  // namespace

TEST_CASE("ingest counts", "[io]") {
    const Dataset a = parse_dataset("2\n2\n2\n", DataShape::Counts);
    REQUIRE(a.counts().bins == std::vector<std::int64_t>{2, 2, 2});
    REQUIRE(a.size() == 6);
    REQUIRE(parse_dataset("4, 0,3\n", DataShape::Counts).counts().bins == std::vector<std::int64_t>{4, 0, 3});
    REQUIRE_THROWS_AS(parse_dataset("", DataShape::Counts), ParseError);
    REQUIRE_THROWS_AS(parse_dataset("\n \n", DataShape::Counts), ParseError);
    try {
        parse_dataset("1\n2\nthree\n", DataShape::Counts);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        REQUIRE(e.line() == 3);
    }
}

TEST_CASE("ingest regression pairs", "[io]") {
    const Dataset d = parse_dataset("x,y\n1,2\n2,7\n", DataShape::RegressionPairs);
    REQUIRE(d.pairs().x == std::vector<double>{1.0, 2.0});
    REQUIRE(d.pairs().y == std::vector<std::int64_t>{2, 7});
    try {
        parse_dataset("x,y\n1,-3\n", DataShape::RegressionPairs);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        REQUIRE(e.line() == 2);
        REQUIRE(std::string(e.what()).find("line 2") != std::string::npos);
    }
    REQUIRE_THROWS_AS(parse_dataset("a,b\n1,2\n", DataShape::RegressionPairs), ParseError);
    REQUIRE_THROWS_AS(parse_dataset("x,y\n1,2.5\n", DataShape::RegressionPairs), ParseError);
    REQUIRE_THROWS_AS(parse_dataset("x,y\n", DataShape::RegressionPairs), ParseError);
}

TEST_CASE("formatted datasets re-ingest to equal datasets", "[io][property]") {
    RandomStream rng(10, 0);
    for (int trial = 0; trial < 30; ++trial) {
        const Dataset counts = ZipfModel(3 + trial % 5).sample({{rng.uniform() * 2}, std::nullopt}, {50, {}}, rng);
        REQUIRE(parse_dataset(format_dataset(counts), DataShape::Counts) == counts);

        RealSamples reals;
        for (int i = 0; i < 20; ++i) reals.values.push_back((rng.uniform() - 0.5) * std::pow(10.0, trial % 7 - 3));
        const Dataset real(reals);
        REQUIRE(parse_dataset(format_dataset(real), DataShape::RealSamples) == real);

        const auto glm = PoissonGlmModel::polynomial(1);
        DesignInfo design{25, {}};
        for (int k = 0; k < 25; ++k) design.covariates.push_back(rng.uniform() * 3 - 1.5);
        const Dataset pairs = glm.sample({{1.0, 0.5}, std::nullopt}, design, rng);
        REQUIRE(parse_dataset(format_dataset(pairs), DataShape::RegressionPairs) == pairs);
    }
}

TEST_CASE("test subcommand writes a consistent JSON report", "[cli]") {
    const auto result = invoke(zipf_test_config());
    REQUIRE(result.code == 0);
    const json j = json::parse(result.out);
    for (const char* key : {"p_value", "std_error", "observed_divergence", "num_simulations", "exceed_count",
                            "excluded_replicates", "theta_hat", "seed", "model", "divergence"})
        REQUIRE(j.contains(key));
    REQUIRE(j["p_value"].get<double>() ==
            j["exceed_count"].get<double>() / j["num_simulations"].get<double>());
    REQUIRE(j["theta_hat"].size() == 1);
    REQUIRE(j["seed"] == 7);
    REQUIRE(j["divergence"] == "chi2");
    REQUIRE_FALSE(j.contains("p_value_plus_one"));
}

TEST_CASE("test subcommand options", "[cli]") {
    auto config = zipf_test_config();
    config.simulations = 1;
    {
        const json j = json::parse(invoke(config).out);
        const double p = j["p_value"];
        REQUIRE((p == 0.0 || p == 1.0));
        REQUIRE(j["std_error"] == 0.0);
    }

    config.simulations = 50;
    config.plus_one = true;
    config.emit_divergences = scratch("divs.tsv").string();
    config.output = scratch("report.json").string();
    REQUIRE(invoke(config).code == 0);
    const json j = json::parse(read_file(config.output));
    REQUIRE(j["p_value_plus_one"].get<double>() == (j["exceed_count"].get<double>() + 1) / 51.0);
    const auto tsv = read_file(config.emit_divergences);
    REQUIRE(tsv.rfind("simulation\tdivergence\n", 0) == 0);
    REQUIRE(std::count(tsv.begin(), tsv.end(), '\n') == 51);

    config.format = OutputFormat::Tsv;
    config.output.clear();
    config.emit_divergences.clear();
    const auto tsv_report = invoke(config).out;
    REQUIRE(tsv_report.find("p_value\t") != std::string::npos);
    REQUIRE(tsv_report.find("theta_hat[0]\t") != std::string::npos);
}

TEST_CASE("sorted-zipf report includes phi_hat", "[cli]") {
    RunConfig c;
    c.model = {"sorted-zipf", 5, 3, {}};
    c.divergence = "kendall";
    c.simulations = 200;
    c.input = kData + "/shuffled_counts.txt";
    const auto result = invoke(c);
    REQUIRE(result.code == 0);
    const json j = json::parse(result.out);
    REQUIRE(j["phi_hat"] == json::array({4, 2, 3, 5, 1}));
    // The data are far from the identity order.
    REQUIRE(j["p_value"].get<double>() < 0.05);
}

TEST_CASE("regression and real-valued families through the CLI", "[cli]") {
    RunConfig c;
    c.model = {"poisson-glm", 0, 3, {}};
    c.divergence = "g2";
    c.simulations = 200;
    c.input = kData + "/glm_pairs.csv";
    auto result = invoke(c);
    REQUIRE(result.code == 0);
    REQUIRE(json::parse(result.out)["theta_hat"].size() == 4);

    c.model = {"exponential", 0, 3, {}};
    c.divergence = "ks";
    c.input = kData + "/exponential_samples.txt";
    result = invoke(c);
    REQUIRE(result.code == 0);
    const double ks = json::parse(result.out)["observed_divergence"];
    REQUIRE(ks >= 0.0);
    REQUIRE(ks <= 1.0);
}

TEST_CASE("enumerate subcommand reproduces the frozen oracle", "[cli][oracle]") {
    RunConfig c;
    c.subcommand = Subcommand::Enumerate;
    c.model = {"zipf", 3, 3, {}};
    c.divergence = "chi2";
    c.input = kData + "/tiny.txt";
    const auto result = invoke(c);
    REQUIRE(result.code == 0);
    const json j = json::parse(result.out);
    REQUIRE(std::fabs(j["exact_p_value"].get<double>() - 0.55138106799161912) < 1e-12);
    REQUIRE(j["outcomes"] == 15);

    c.model.family = "poisson-glm";
    c.divergence = "g2";
    c.input = kData + "/glm_pairs.csv";
    REQUIRE(invoke(c).code == 2);
}

TEST_CASE("configuration and data errors produce error objects", "[cli]") {
    auto c = zipf_test_config();
    c.divergence = "g2";
    auto result = invoke(c);
    REQUIRE(result.code == 2);
    REQUIRE(json::parse(result.err)["error"]["kind"] == "config");

    c = zipf_test_config();
    c.model.bins = 4;
    result = invoke(c);
    REQUIRE(result.code == 1);
    REQUIRE(json::parse(result.err)["error"]["kind"] == "data");

    c = zipf_test_config();
    c.input = kData + "/does_not_exist.txt";
    REQUIRE(invoke(c).code == 1);

    c = zipf_test_config();
    c.model.family = "gamma";
    REQUIRE(invoke(c).code == 2);

    std::filesystem::path bad = scratch("bad_pairs.csv");
    std::ofstream(bad) << "x,y\n1,-3\n";
    c = RunConfig{};
    c.model = {"poisson-glm", 0, 1, {}};
    c.divergence = "g2";
    c.input = bad.string();
    result = invoke(c);
    REQUIRE(result.code == 1);
    const json err = json::parse(result.err);
    REQUIRE(err["error"]["kind"] == "parse");
    REQUIRE(err["error"]["message"].get<std::string>().find("line 2") != std::string::npos);
}

TEST_CASE("seed precedence", "[cli]") {
    ::unsetenv("GOFMC_SEED");
    REQUIRE(resolve_seed(std::nullopt) == kDefaultSeed);
    ::setenv("GOFMC_SEED", "12345", 1);
    REQUIRE(resolve_seed(std::nullopt) == 12345);
    REQUIRE(resolve_seed(99) == 99);
    ::setenv("GOFMC_SEED", "abc", 1);
    REQUIRE_THROWS_AS(resolve_seed(std::nullopt), ConfigError);
    ::unsetenv("GOFMC_SEED");
}

TEST_CASE("calibrate subcommand", "[cli][calibration]") {
    RunConfig c;
    c.subcommand = Subcommand::Calibrate;
    c.output = scratch("summary.json").string();
    c.pvalues_path = scratch("pv.tsv").string();
    REQUIRE(invoke(c).code == 0);
    const json summary = json::parse(read_file(c.output));
    REQUIRE(summary.contains("ks_distance"));
    REQUIRE(summary["replications"] == 400);
    const auto tsv = read_file(c.pvalues_path);
    REQUIRE(std::count(tsv.begin(), tsv.end(), '\n') == 400);
    REQUIRE(invoke(c).code == 0);
    REQUIRE(read_file(c.pvalues_path) == tsv);

    c.spec_path = std::string(GOFMC_TEST_DATA_DIR) + "/../cli/calib_glm.json";
    REQUIRE(invoke(c).code == 0);
    REQUIRE(json::parse(read_file(c.output))["tested_model"] == "poisson-glm(degree=1)");

    const auto spec = scratch("r0.json");
    std::ofstream(spec) << R"({"replications": 0})";
    c.spec_path = spec.string();
    const auto result = invoke(c);
    REQUIRE(result.code == 2);
    REQUIRE(json::parse(result.err)["error"]["message"].get<std::string>().find("replications") != std::string::npos);

    REQUIRE_THROWS_AS(parse_calibration_config("[1,2]"), ConfigError);
    REQUIRE_THROWS_AS(parse_calibration_config(R"({"divergence": "g2"})"), ConfigError);
}
