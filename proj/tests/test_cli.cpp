#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qhsub/cli.hpp"
#include "qhsub/errors.hpp"

using namespace qhsub;
namespace fs = std::filesystem;

TEST_SUITE_BEGIN("cli");

namespace {

fs::path temp_dir(const std::string& tag) {
    fs::path dir = fs::temp_directory_path() / ("qhsub_test_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunConfig quick_config(const std::string& builtin, const fs::path& out) {
    RunConfig config = load_config(std::nullopt, builtin, std::nullopt, out.string(), std::nullopt);
    config.grid.radial_points = 12;
    config.grid.angular_points = 128;
    config.grid.tau_points = 64;
    config.sweep.xi_min = 1e2;
    config.sweep.xi_max = 1e4;
    config.sweep.n_points = 9;
    config.n_samples = 1024;
    config.operator_ratio = false;
    return config;
}

}  // namespace

TEST_CASE("config loading") {
    const fs::path dir = temp_dir("config");
    const fs::path cfg = dir / "run.json";
    std::ofstream(cfg) << R"({
        "symbol": {"builtin": "maire-l1"},
        "direction": "both",
        "grid": {"radial_points": 10, "angular_points": 100, "tau_points": 50},
        "sweep": {"xi_min": 10.0, "xi_max": 1e4, "n_points": 9},
        "seed": 7,
        "n_samples": 512
    })";
    const RunConfig config = load_config(cfg.string(), std::nullopt, std::nullopt, dir.string(), std::nullopt);
    CHECK(config.direction == RunDirection::Both);
    CHECK(config.grid.radial_points == 10);
    CHECK(config.sweep.n_points == 9);
    CHECK(config.seed == 7);
    CHECK(config.n_samples == 512);
    // command-line overrides win
    const RunConfig forced = load_config(cfg.string(), std::string("negmax"), std::string("pos"), dir.string(),
                                         std::uint64_t{11});
    CHECK(forced.direction == RunDirection::Pos);
    CHECK(forced.seed == 11);
    CHECK(forced.symbol_text.find("negmax") != std::string::npos);

    CHECK_THROWS_AS(load_config(std::nullopt, std::nullopt, std::nullopt, std::nullopt, std::nullopt),
                    MalformedInput);
    CHECK_THROWS_AS(load_config(std::nullopt, std::string("maire-l1"), std::string("sideways"), std::nullopt,
                                std::nullopt),
                    MalformedInput);
}

TEST_CASE("check command exit codes and outputs") {
    SUBCASE("passing builtin") {
        const fs::path dir = temp_dir("check_pass");
        CHECK(cmd_check(quick_config("maire-l1", dir)) == 0);
        const auto j = nlohmann::json::parse(slurp(dir / "verdict.json"));
        CHECK(j["xi_positive"]["pass"].get<bool>());
        CHECK(j["xi_positive"]["p_global"]["num"].get<int>() == 1);
        CHECK(fs::exists(dir / "run_meta.json"));
    }
    SUBCASE("failing builtin exits 2 with the failing item recorded") {
        const fs::path dir = temp_dir("check_fail");
        CHECK(cmd_check(quick_config("negmax", dir)) == 2);
        const auto j = nlohmann::json::parse(slurp(dir / "verdict.json"));
        CHECK(!j["xi_positive"]["pass"].get<bool>());
        CHECK(!j["xi_positive"]["items"][1]["pass"].get<bool>());
    }
    SUBCASE("malformed symbols raise before any run") {
        const fs::path dir = temp_dir("check_bad");
        RunConfig config = quick_config("maire-l1", dir);
        config.symbol_text = R"({"l1":2,"l2":1,"m":1,"monomials":[[2,0,1]]})";  // ell < 1
        CHECK_THROWS_AS(cmd_check(config), ConstraintViolation);
    }
}

TEST_CASE("certify command") {
    SUBCASE("both directions of the quasielliptic symbol") {
        const fs::path dir = temp_dir("certify_both");
        RunConfig config = quick_config("quasielliptic-l2-m4", dir);
        config.direction = RunDirection::Both;
        CHECK(cmd_certify(config) == 2);  // negative direction is refused
        const auto j = nlohmann::json::parse(slurp(dir / "certificate.json"));
        CHECK(j["xi_positive"]["pass"].get<bool>());
        CHECK(j["xi_positive"]["a"]["num"].get<int>() == 4);
        CHECK(j["xi_negative"]["refused"].get<bool>());
        CHECK(!j["xi_negative"]["verdict"]["items"][0]["pass"].get<bool>());
        CHECK(!j["xi_positive"]["plans"].empty());
    }
    SUBCASE("maire passes cleanly") {
        const fs::path dir = temp_dir("certify_maire");
        CHECK(cmd_certify(quick_config("maire-l1", dir)) == 0);
        const auto j = nlohmann::json::parse(slurp(dir / "certificate.json"));
        CHECK(j["xi_positive"]["s_order"]["den"].get<int>() == 3);
    }
    SUBCASE("refusal carries a witness") {
        const fs::path dir = temp_dir("certify_negmax");
        CHECK(cmd_certify(quick_config("negmax", dir)) == 2);
        const auto j = nlohmann::json::parse(slurp(dir / "certificate.json"));
        CHECK(j["xi_positive"]["refused"].get<bool>());
        CHECK(!j["xi_positive"]["verdict"]["items"][1]["detail"].get<std::string>().empty());
    }
}

TEST_CASE("estimate command reuses cached certificates and writes reports") {
    const fs::path dir = temp_dir("estimate");
    RunConfig config = quick_config("maire-l1", dir);
    REQUIRE(cmd_certify(config) == 0);
    const std::string cert_before = slurp(dir / "certificate.json");
    CHECK(cmd_estimate(config) == 0);
    CHECK(slurp(dir / "certificate.json") == cert_before);  // cache honored, not recomputed
    const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
    const double fitted = report["xi_positive"]["fitted_slope"].get<double>();
    CHECK(fitted < 0.0);
    CHECK(report["xi_positive"]["predicted_slope"].get<double>() == doctest::Approx(-1.0 / 3.0));
    const std::string csv = slurp(dir / "decay.csv");
    CHECK(csv.rfind("xi,M,operator_ratio\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + config.sweep.n_points);
    // estimate without a passing certificate is refused
    const fs::path dir2 = temp_dir("estimate_refused");
    CHECK(cmd_estimate(quick_config("negmax", dir2)) == 2);
}

TEST_CASE("byte-identical outputs for identical config and seed") {
    const fs::path d1 = temp_dir("determinism_1");
    const fs::path d2 = temp_dir("determinism_2");
    RunConfig c1 = quick_config("maire-l1", d1);
    RunConfig c2 = quick_config("maire-l1", d2);
    CHECK(cmd_certify(c1) == 0);
    CHECK(cmd_certify(c2) == 0);
    CHECK(slurp(d1 / "certificate.json") == slurp(d2 / "certificate.json"));
    CHECK(cmd_estimate(c1) == 0);
    CHECK(cmd_estimate(c2) == 0);
    CHECK(slurp(d1 / "report.json") == slurp(d2 / "report.json"));
    CHECK(slurp(d1 / "decay.csv") == slurp(d2 / "decay.csv"));
}

TEST_CASE("builtin catalogue") {
    CHECK(cmd_examples_list() == 0);
    for (const std::string& name : builtin_names()) CHECK(!builtin_description(name).empty());
}

TEST_SUITE_END();
