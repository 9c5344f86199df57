#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "slowfast/flow.hpp"
#include "slowfast/system.hpp"

// Batch front-end: experiment configs, identity / oracle / normal-form /
// drift suites, and machine-readable result emission (CSV rows plus a JSON
// summary). Reruns with an identical config produce identical output except
// for the wall_time_ms column.

namespace slowfast {

struct ExperimentConfig {
    std::string system_id;
    std::map<std::string, double> system_params;
    /// Explicit initial points as flat [y x p q] arrays; generated from the
    /// seed when empty.
    std::vector<Eigen::VectorXd> initial_points;
    int n_points = 20;
    std::vector<double> eps_ladder{0.1, 0.05, 0.025, 0.0125};  // >= 3 entries,
                                                                // strictly decreasing
    int quadrature_N = 256;
    IntegratorConfig integrator{};
    double horizon_c = 1.0;
    std::vector<std::string> suites{"identities", "oracle", "normal-form", "drift"};
    std::uint64_t seed = 12345;
    std::string output_path = ".";
};

/// Parses and schema-checks a config file; throws ConfigError on violations.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config_json(const std::string& text);

struct ResultRow {
    std::string suite, system_id, check_id;
    int point_index = -1;  // -1 renders as an empty column (aggregate rows)
    std::optional<double> eps;
    double value = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    double wall_ms = 0.0;
};

/// Deterministic admissible points: fast variables on an energy shell
/// (0.5 <= Q_A <= 2.0 for quadratic systems, same bounds on the fast action
/// otherwise), slow variables in [-0.75, 0.75], rejection-sampled against the
/// domain guard.
std::vector<PhasePoint> generate_points(const SlowFastSystem& sys, int n, std::uint64_t seed);

/// Least-squares slope of log(value) against log(eps).
double fit_loglog_slope(const std::vector<std::pair<double, double>>& eps_value);

/// Runs the requested suites and writes results.csv and summary.json under
/// out_dir. Returns 0 when every check passed, 1 otherwise. Configuration
/// problems throw ConfigError (the CLI maps them to exit code 2).
int run_experiment(const ExperimentConfig& config, const std::string& out_dir, int jobs = 1);

/// CSV header, fixed: suite,system_id,check_id,point_index,eps,value,tolerance,pass,wall_time_ms
std::string result_csv_header();

}  // namespace slowfast
