#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "tabadv/runner.hpp"
#include "tabadv/synth.hpp"

using namespace tabadv;
using cli::ExperimentConfig;

namespace {

namespace fs = std::filesystem;

fs::path test_dir() {
    const fs::path dir = fs::temp_directory_path() / "tabadv_tests";
    fs::create_directories(dir);
    return dir;
}

const std::string& fixture_csv() {
    static const std::string path = [] {
        const fs::path file = test_dir() / "cli_fixture.csv";
        cli::make_synthetic(cli::SyntheticKind::SeparableGaussians, 200, 4, 11, file.string());
        return file.string();
    }();
    return path;
}

std::string minimal_config() {
    return "dataset_path = " + fixture_csv() +
           "\nattack = evasion\nvictim = lr\ngenerator = vae_mlp\n";
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Drop the final (wall-time) column of every data row.
std::string strip_wall_time(const std::string& csv) {
    std::stringstream in(csv), out;
    std::string line;
    while (std::getline(in, line)) {
        const auto comma = line.find_last_of(',');
        out << line.substr(0, comma) << "\n";
    }
    return out.str();
}

}  // namespace

TEST_CASE("minimal config fills documented defaults", "[cli]") {
    const auto configs = cli::parse_config_text(minimal_config());
    REQUIRE(configs.size() == 1);
    const ExperimentConfig& cfg = configs[0];
    CHECK(cfg.epochs == 200);
    CHECK(cfg.hidden_layers == std::vector<std::size_t>{16});
    CHECK(cfg.lr == 0.01);
    CHECK(cfg.optimizer == net::OptimizerKind::Adam);
    CHECK(cfg.latent_dim == 2);
    CHECK(cfg.batch_size == 64);
    CHECK(cfg.smote == cli::SmoteMode::Auto);
    CHECK(cfg.seed == 42);
    CHECK(cfg.threshold == 0.5);
    CHECK_FALSE(cfg.identity_generator);
    CHECK(cfg.dataset_id() == "cli_fixture");
}

TEST_CASE("parse_config reads files and comments", "[cli]") {
    const fs::path path = test_dir() / "parse.conf";
    std::ofstream out(path);
    out << "# comment line\n\n" << minimal_config() << "epochs = 150\n";
    out.close();
    const auto configs = cli::parse_config(path.string());
    REQUIRE(configs.size() == 1);
    CHECK(configs[0].epochs == 150);
    CHECK_THROWS_AS(cli::parse_config("/nonexistent/nope.conf"), IoError);
}

TEST_CASE("grid keys expand to the cartesian product", "[cli]") {
    const std::string text = "dataset_path = d.csv\nattack = evasion\nvictim = lr\n"
                             "generator = vae_wnn\nwavelet = [morlet, gaussian]\n"
                             "latent_dim = [2, 4]\n";
    const auto configs = cli::parse_config_text(text);
    REQUIRE(configs.size() == 4);
    // first axis outermost
    CHECK(configs[0].wavelet == net::WaveletKind::Morlet);
    CHECK(configs[0].latent_dim == 2);
    CHECK(configs[1].wavelet == net::WaveletKind::Morlet);
    CHECK(configs[1].latent_dim == 4);
    CHECK(configs[2].wavelet == net::WaveletKind::Gaussian);
    CHECK(configs[2].latent_dim == 2);
    CHECK(configs[3].wavelet == net::WaveletKind::Gaussian);
    CHECK(configs[3].latent_dim == 4);
}

TEST_CASE("hidden_layers grammar", "[cli]") {
    const auto one = cli::parse_config_text(minimal_config() + "hidden_layers = 32\n");
    CHECK(one[0].hidden_layers == std::vector<std::size_t>{32});
    const auto two = cli::parse_config_text(minimal_config() + "hidden_layers = 16x8\n");
    CHECK(two[0].hidden_layers == std::vector<std::size_t>{16, 8});
    const auto grid = cli::parse_config_text(minimal_config() + "hidden_layers = [16, 32x16x8]\n");
    REQUIRE(grid.size() == 2);
    CHECK(grid[1].hidden_layers == std::vector<std::size_t>{32, 16, 8});
}

TEST_CASE("incompatible generator/field pairs are rejected", "[cli]") {
    CHECK_THROWS_WITH(cli::parse_config_text(minimal_config() + "wavelet = morlet\n"),
                      Catch::Matchers::ContainsSubstring("wavelet"));
    CHECK_THROWS_WITH(
        cli::parse_config_text("dataset_path = d.csv\nattack = evasion\nvictim = lr\n"
                               "generator = cvae_wnn\nactivation = relu\n"),
        Catch::Matchers::ContainsSubstring("activation"));
    CHECK_THROWS_WITH(cli::parse_config_text(minimal_config() + "chaos_seed = 0.2\n"),
                      Catch::Matchers::ContainsSubstring("chaos_seed"));
    // compatible pairs pass
    CHECK_NOTHROW(cli::parse_config_text(
        "dataset_path = d.csv\nattack = poison\nvictim = dt\ngenerator = cvae_wnn\n"
        "wavelet = shannon\nchaos_seed = 0.2\n"));
}

TEST_CASE("config errors name the offending key", "[cli]") {
    CHECK_THROWS_WITH(cli::parse_config_text(minimal_config() + "no_such_key = 1\n"),
                      Catch::Matchers::ContainsSubstring("no_such_key"));
    CHECK_THROWS_WITH(cli::parse_config_text(minimal_config() + "epochs = 0\n"),
                      Catch::Matchers::ContainsSubstring("epochs"));
    CHECK_THROWS_WITH(
        cli::parse_config_text(
            "dataset_path = d.csv\nattack = evasion\nvictim = svm\ngenerator = vae_mlp\n"),
        Catch::Matchers::ContainsSubstring("svm"));
    CHECK_THROWS_WITH(cli::parse_config_text(minimal_config() + "epochs = 5\nepochs = 6\n"),
                      Catch::Matchers::ContainsSubstring("duplicate"));
    CHECK_THROWS_WITH(cli::parse_config_text("attack = evasion\nvictim = lr\ngenerator = vae_mlp\n"),
                      Catch::Matchers::ContainsSubstring("dataset_path"));
    CHECK_THROWS_WITH(cli::parse_config_text(minimal_config() + "dataset_path = [a, b]\n"),
                      Catch::Matchers::ContainsSubstring("duplicate"));
    CHECK_THROWS_WITH(
        cli::parse_config_text("dataset_path = [a, b]\nattack = evasion\nvictim = lr\n"
                               "generator = vae_mlp\n"),
        Catch::Matchers::ContainsSubstring("dataset_path"));
}

TEST_CASE("run_experiments writes one CSV row per experiment", "[cli]") {
    const std::string text = minimal_config() +
                             "identity_generator = true\nlr_epochs = 50\n"
                             "latent_dim = [2, 3]\nseed = [1, 2]\n";
    const auto configs = cli::parse_config_text(text);
    REQUIRE(configs.size() == 4);

    const fs::path out = test_dir() / "run_grid";
    const auto outcome = cli::run_experiments(configs, out.string());
    CHECK(outcome.exit_code() == 0);
    CHECK(outcome.records.size() == 4);

    const std::string csv = read_file(out / "summary.csv");
    std::size_t lines = 0;
    std::stringstream ss(csv);
    std::string line;
    while (std::getline(ss, line)) ++lines;
    CHECK(lines == 5);  // header + 4 rows
    CHECK(csv.rfind(cli::kSummaryHeader, 0) == 0);

    for (int i = 0; i < 4; ++i) {
        CHECK(fs::exists(out / ("run_" + std::to_string(i) + ".json")));
    }
}

TEST_CASE("reruns are byte-identical apart from wall time", "[cli]") {
    const std::string text = minimal_config() + "identity_generator = true\nlr_epochs = 40\n";
    const auto configs = cli::parse_config_text(text);

    const fs::path out1 = test_dir() / "rerun_a";
    const fs::path out2 = test_dir() / "rerun_b";
    cli::run_experiments(configs, out1.string());
    cli::run_experiments(configs, out2.string());
    CHECK(strip_wall_time(read_file(out1 / "summary.csv")) ==
          strip_wall_time(read_file(out2 / "summary.csv")));
}

TEST_CASE("a failing experiment is isolated and flips the exit code", "[cli]") {
    std::vector<ExperimentConfig> configs = cli::parse_config_text(
        minimal_config() + "identity_generator = true\nlr_epochs = 30\n");
    ExperimentConfig broken = configs[0];
    broken.dataset_path = "/nonexistent/gone.csv";
    configs.push_back(broken);
    configs.push_back(configs[0]);

    const fs::path out = test_dir() / "run_partial";
    const auto outcome = cli::run_experiments(configs, out.string());
    CHECK(outcome.exit_code() == 1);
    REQUIRE(outcome.records.size() == 3);
    CHECK(outcome.records[0].ok());
    CHECK_FALSE(outcome.records[1].ok());
    CHECK(outcome.records[1].stage == "load");
    CHECK(outcome.records[2].ok());

    const std::string csv = read_file(out / "summary.csv");
    CHECK_THAT(csv, Catch::Matchers::ContainsSubstring("error:load"));
}

TEST_CASE("workers > 1 produce the same records as sequential runs", "[cli]") {
    const std::string text = minimal_config() +
                             "identity_generator = true\nlr_epochs = 30\nseed = [1, 2, 3, 4]\n";
    const auto configs = cli::parse_config_text(text);
    const fs::path seq = test_dir() / "run_seq";
    const fs::path par = test_dir() / "run_par";
    cli::run_experiments(configs, seq.string(), 1);
    cli::run_experiments(configs, par.string(), 4);
    CHECK(strip_wall_time(read_file(seq / "summary.csv")) ==
          strip_wall_time(read_file(par / "summary.csv")));
}

TEST_CASE("reports round-trip through json", "[cli]") {
    const auto configs = cli::parse_config_text(
        minimal_config() + "identity_generator = true\nlr_epochs = 25\n");
    const fs::path out = test_dir() / "run_json";
    cli::run_experiments(configs, out.string());

    std::ifstream in(out / "run_0.json");
    const auto j = nlohmann::json::parse(in);
    CHECK(j.at("status") == "ok");
    const ExperimentConfig rebuilt = cli::config_from_report_json(j);
    CHECK(rebuilt.dataset_path == configs[0].dataset_path);
    CHECK(rebuilt.seed == configs[0].seed);
    CHECK(rebuilt.lr_epochs == configs[0].lr_epochs);
    CHECK(rebuilt.identity_generator == configs[0].identity_generator);
    CHECK(cli::config_to_json(rebuilt) == cli::config_to_json(configs[0]));
}

TEST_CASE("make_synthetic contracts", "[cli]") {
    const fs::path a = test_dir() / "synth_a.csv";
    const fs::path b = test_dir() / "synth_b.csv";
    const auto ds = cli::make_synthetic(cli::SyntheticKind::ImbalancedGaussians, 1000, 4, 5,
                                        a.string());
    std::size_t ones = 0;
    for (int l : ds.labels) ones += static_cast<std::size_t>(l);
    CHECK(ds.n() == 1000);
    CHECK(ones == 100);

    cli::make_synthetic(cli::SyntheticKind::ImbalancedGaussians, 1000, 4, 5, b.string());
    CHECK(read_file(a) == read_file(b));

    CHECK_THROWS_AS(cli::make_synthetic_dataset(cli::SyntheticKind::SeparableGaussians, 10, 4, 1),
                    DomainError);
    CHECK_THROWS_AS(cli::parse_synthetic_kind("blobs"), ConfigError);
}
