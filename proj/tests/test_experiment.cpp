#include <catch2/catch_amalgamated.hpp>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "slowfast/catalog.hpp"
#include "slowfast/errors.hpp"
#include "slowfast/experiment.hpp"
#include "slowfast/sl2.hpp"

using namespace slowfast;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// strip the wall_time_ms column (the only non-reproducible field)
std::string without_wall_time(const std::string& csv) {
    std::string out;
    std::istringstream in(csv);
    std::string line;
    while (std::getline(in, line)) {
        const auto pos = line.rfind(',');
        out += line.substr(0, pos);
        out += '\n';
    }
    return out;
}

}  // namespace

TEST_CASE("point generation", "[experiment]") {
    auto sys = make_system("twist2");
    SECTION("deterministic for a fixed seed") {
        auto a = generate_points(sys, 10, 777);
        auto b = generate_points(sys, 10, 777);
        REQUIRE(a.size() == b.size());
        for (size_t i = 0; i < a.size(); ++i) CHECK(distance(a[i], b[i]) == 0.0);
        auto c = generate_points(sys, 10, 778);
        CHECK(distance(a[0], c[0]) > 0.0);
    }
    SECTION("all points pass the domain guard") {
        for (const auto& m : generate_points(sys, 25, 3)) CHECK(sys.admissible(m));
    }
    SECTION("fast variables live on the requested action shell") {
        for (const auto& m : generate_points(sys, 25, 5)) {
            const double level = q_form(sys.quadratic->A_at(m), QuadraticSystem::fast(m));
            CHECK(level >= 0.5);
            CHECK(level <= 2.0);
        }
    }
    SECTION("impossible guard raises a sampling error") {
        SlowFastSystem blocked = sys;
        blocked.domain_guard = [](const PhasePoint&) { return false; };
        CHECK_THROWS_AS(generate_points(blocked, 5, 1), SamplingError);
    }
}

TEST_CASE("config parsing and validation", "[experiment]") {
    SECTION("minimal config fills defaults") {
        auto cfg = parse_config_json(R"({"system_id": "u-twist"})");
        CHECK(cfg.system_id == "u-twist");
        CHECK(cfg.quadrature_N == 256);
        CHECK(cfg.n_points == 20);
        CHECK(cfg.suites.size() == 4);
    }
    SECTION("rejects malformed documents") {
        CHECK_THROWS_AS(parse_config_json("not json"), ConfigError);
        CHECK_THROWS_AS(parse_config_json(R"([1,2,3])"), ConfigError);
        CHECK_THROWS_AS(parse_config_json(R"({"no_system": true})"), ConfigError);
        CHECK_THROWS_AS(parse_config_json(R"({"system_id": "u-twist", "typo_key": 1})"),
                        ConfigError);
    }
    SECTION("rejects bad ladders and node counts") {
        CHECK_THROWS_AS(
            parse_config_json(R"({"system_id": "u-twist", "eps_ladder": [0.1, 0.2]})"),
            ConfigError);
        CHECK_THROWS_AS(
            parse_config_json(R"({"system_id": "u-twist", "eps_ladder": [0.1, -0.05, 0.01]})"),
            ConfigError);
        CHECK_THROWS_AS(parse_config_json(R"({"system_id": "u-twist", "quadrature_N": 16})"),
                        ConfigError);
        CHECK_THROWS_AS(parse_config_json(R"({"system_id": "u-twist", "quadrature_N": 33})"),
                        ConfigError);
        CHECK_THROWS_AS(
            parse_config_json(
                R"({"system_id": "u-twist", "suites": ["drift"], "eps_ladder": [0.1, 0.05]})"),
            ConfigError);
        CHECK_THROWS_AS(parse_config_json(R"({"system_id": "u-twist", "suites": ["bogus"]})"),
                        ConfigError);
    }
    SECTION("unknown system ids surface as config errors at run time") {
        auto cfg = parse_config_json(R"({"system_id": "mystery"})");
        CHECK_THROWS_AS(run_experiment(cfg, "/tmp/slowfast-test-unknown", 1), ConfigError);
    }
    SECTION("initial points are dimension- and guard-checked") {
        auto cfg = parse_config_json(
            R"({"system_id": "u-twist", "suites": ["identities"],
                "initial_points": [[0.9, 0.4, 0.3]]})");
        CHECK_THROWS_AS(run_experiment(cfg, "/tmp/slowfast-test-dim", 1), ConfigError);
        auto cfg2 = parse_config_json(
            R"({"system_id": "u-twist", "suites": ["identities"],
                "initial_points": [[0.0, 0.0, 0.3, 0.1]]})");
        CHECK_THROWS_AS(run_experiment(cfg2, "/tmp/slowfast-test-guard", 1), ConfigError);
    }
}

TEST_CASE("experiment runs write reproducible results", "[experiment]") {
    const fs::path out_a = fs::temp_directory_path() / "slowfast-exp-a";
    const fs::path out_b = fs::temp_directory_path() / "slowfast-exp-b";
    fs::remove_all(out_a);
    fs::remove_all(out_b);

    ExperimentConfig cfg = parse_config_json(R"({
        "system_id": "osc-const",
        "suites": ["identities", "normal-form"],
        "n_points": 2,
        "quadrature_N": 64,
        "seed": 99
    })");

    SECTION("pass, exit code 0, exact header, identical reruns") {
        const int rc1 = run_experiment(cfg, out_a.string(), 2);
        const int rc2 = run_experiment(cfg, out_b.string(), 1);
        CHECK(rc1 == 0);
        CHECK(rc2 == 0);

        const std::string csv_a = slurp(out_a / "results.csv");
        const std::string csv_b = slurp(out_b / "results.csv");
        CHECK(csv_a.substr(0, csv_a.find('\n')) == result_csv_header());
        CHECK(without_wall_time(csv_a) == without_wall_time(csv_b));
        CHECK(fs::exists(out_a / "summary.json"));
        CHECK(slurp(out_a / "summary.json").find("\"all_pass\": true") != std::string::npos);
    }
    SECTION("runtime errors become failed rows and exit code 1") {
        ExperimentConfig bad = cfg;
        bad.integrator.force_numeric = true;
        bad.integrator.substeps_per_node = 1;
        bad.integrator.closure_tol = 1e-15;  // orbits cannot close this well
        const fs::path out_c = fs::temp_directory_path() / "slowfast-exp-c";
        fs::remove_all(out_c);
        const int rc = run_experiment(bad, out_c.string(), 1);
        CHECK(rc == 1);
        const std::string csv = slurp(out_c / "results.csv");
        CHECK(csv.find("error:") != std::string::npos);
        CHECK(csv.find("false") != std::string::npos);
    }
}

TEST_CASE("all four suites run end to end on a quadratic system", "[experiment][slow]") {
    const fs::path out = fs::temp_directory_path() / "slowfast-exp-full";
    fs::remove_all(out);
    ExperimentConfig cfg = parse_config_json(R"({
        "system_id": "u-twist",
        "suites": ["identities", "oracle", "normal-form", "drift"],
        "n_points": 1,
        "quadrature_N": 64,
        "seed": 7
    })");
    CHECK(run_experiment(cfg, out.string(), 2) == 0);
    const std::string csv = slurp(out / "results.csv");
    for (const char* id : {"pr1:", "q1", "theta-p-cross", "kavg-cross", "f-cross",
                           "main1-residual", "adi-renorm-negative-max", "energy-drift",
                           "slope-J", "slope-F"}) {
        INFO(id);
        CHECK(csv.find(id) != std::string::npos);
    }
    const std::string summary = slurp(out / "summary.json");
    CHECK(summary.find("slope-F:point=0") != std::string::npos);
}

TEST_CASE("oracle suite needs a quadratic system", "[experiment]") {
    ExperimentConfig cfg = parse_config_json(R"({
        "system_id": "anharmonic",
        "suites": ["oracle"],
        "n_points": 1
    })");
    CHECK_THROWS_AS(run_experiment(cfg, "/tmp/slowfast-test-oracle", 1), ConfigError);
}
