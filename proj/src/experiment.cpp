#include "slowfast/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <deque>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <thread>

#include <json.hpp>

#include "slowfast/budgets.hpp"
#include "slowfast/catalog.hpp"
#include "slowfast/connection.hpp"
#include "slowfast/errors.hpp"
#include "slowfast/fourier.hpp"
#include "slowfast/normal_form.hpp"
#include "slowfast/sl2.hpp"

namespace slowfast {

namespace {

using nlohmann::json;

constexpr double two_pi = 2.0 * std::numbers::pi;

struct StopWatch {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    }
};

struct Rng {
    std::mt19937_64 eng;
    explicit Rng(std::uint64_t seed) : eng(seed) {}
    // explicit mapping keeps the stream identical across standard libraries
    double uniform() { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }
    double range(double lo, double hi) { return lo + (hi - lo) * uniform(); }
};

const std::set<std::string> known_suites{"identities", "oracle", "normal-form", "drift"};

ResultRow make_row(std::string suite, std::string system, std::string check, int point,
                   std::optional<double> eps, double value, double tol, bool pass, double ms) {
    ResultRow r;
    r.suite = std::move(suite);
    r.system_id = std::move(system);
    r.check_id = std::move(check);
    r.point_index = point;
    r.eps = eps;
    r.value = value;
    r.tolerance = tol;
    r.pass = pass;
    r.wall_ms = ms;
    return r;
}

ResultRow residual_row(const std::string& suite, const std::string& system,
                       const std::string& check, int point, std::optional<double> eps, double value,
                       double tol, double ms) {
    return make_row(suite, system, check, point, eps, value, tol, std::abs(value) <= tol, ms);
}

// ---------------------------------------------------------------------------
// identity suite
// ---------------------------------------------------------------------------

struct NamedField {
    std::string name;
    ScalarField field;
};

std::vector<NamedField> identity_test_fields(const SlowFastSystem& sys) {
    std::vector<NamedField> fields;
    fields.push_back({"H*p", ScalarField{
        [&sys](const PhasePoint& m) { return sys.H(m) * m.p(0); },
        [&sys](const PhasePoint& m) {
            Covector g = sys.grad(m);
            const double h = sys.H(m), p = m.p(0);
            Covector out{g.cy * p, g.cx * p, g.cp * p, g.cq * p};
            out.cp(0) += h;
            return out;
        }}});
    fields.push_back({"y*q", ScalarField{
        [](const PhasePoint& m) { return m.y(0) * m.q(0); },
        [](const PhasePoint& m) {
            Covector g = Covector::zero(m.r(), m.k());
            g.cy(0) = m.q(0);
            g.cq(0) = m.y(0);
            return g;
        }}});
    fields.push_back({"x^2*p", ScalarField{
        [](const PhasePoint& m) { return m.x(0) * m.x(0) * m.p(0); },
        [](const PhasePoint& m) {
            Covector g = Covector::zero(m.r(), m.k());
            g.cx(0) = 2.0 * m.x(0) * m.p(0);
            g.cp(0) = m.x(0) * m.x(0);
            return g;
        }}});
    return fields;
}

std::vector<ResultRow> identities_at_point(const SlowFastSystem& sys, const PhasePoint& m,
                                           int point_index, const OrbitConfig& cfg) {
    std::vector<ResultRow> rows;
    const OrbitSample orbit = sample_orbit(sys, m, cfg);
    const int outer = 16;
    const int stride = cfg.nodes / outer;

    for (const auto& nf : identity_test_fields(sys)) {
        const ScalarField& f = nf.field;

        {
            StopWatch sw;
            ScalarField sf_field{[&](const PhasePoint& mm) {
                return s_function(sys, f, sample_orbit(sys, mm, cfg));
            }, nullptr};
            const double lhs = lie_derivative_upsilon(sys, sf_field, m, cfg.integrator);
            const double rhs = f.value(m) - average_function(sys, f, orbit);
            rows.push_back(residual_row("identities", sys.id, "pr1:f=" + nf.name, point_index, {},
                                        lhs - rhs, budgets::quad_identity_tol, sw.ms()));
        }
        {
            StopWatch sw;
            ScalarField lf{[&](const PhasePoint& mm) {
                return lie_derivative_upsilon(sys, f, mm, cfg.integrator);
            }, nullptr};
            const double v = average_function(sys, lf, orbit);
            rows.push_back(residual_row("identities", sys.id, "pr2a:f=" + nf.name, point_index, {},
                                        v, budgets::quad_identity_tol, sw.ms()));
        }
        {
            StopWatch sw;
            ScalarField avg_field{[&](const PhasePoint& mm) {
                return average_function(sys, f, sample_orbit(sys, mm, cfg));
            }, nullptr};
            const double v = lie_derivative_upsilon(sys, avg_field, m, cfg.integrator);
            rows.push_back(residual_row("identities", sys.id, "pr2b:f=" + nf.name, point_index, {},
                                        v, budgets::quad_identity_tol, sw.ms()));
        }
        {
            StopWatch sw;
            double acc = 0.0;
            for (int j = 0; j < outer; ++j)
                acc += s_function(sys, f, sample_orbit(sys, orbit.states[j * stride], cfg));
            rows.push_back(residual_row("identities", sys.id, "pr3a:f=" + nf.name, point_index, {},
                                        acc / outer, budgets::quad_identity_tol, sw.ms()));
        }
        {
            StopWatch sw;
            ScalarField avg_field{[&](const PhasePoint& mm) {
                return average_function(sys, f, sample_orbit(sys, mm, cfg));
            }, nullptr};
            OrbitConfig outer_cfg = cfg;
            outer_cfg.nodes = outer;
            const double v = s_function(sys, avg_field, sample_orbit(sys, m, outer_cfg));
            rows.push_back(residual_row("identities", sys.id, "pr3b:f=" + nf.name, point_index, {},
                                        v, budgets::quad_identity_tol, sw.ms()));
        }
    }

    // zero-average checks for the connection 1-form and the slow momentum
    // derivatives, through fresh per-node quadratures
    for (int i = 0; i < sys.k; ++i) {
        StopWatch sw;
        double tp = 0.0, tq = 0.0, jp = 0.0, jq = 0.0;
        for (int j = 0; j < outer; ++j) {
            const PhasePoint& node = orbit.states[j * stride];
            auto [a, b] = theta(sys, node, i, cfg);
            tp += a;
            tq += b;
            auto [c, d] = dJ_slow(sys, node, i, cfg);
            jp += c;
            jq += d;
        }
        const double ms = sw.ms() / 4.0;
        const std::string suffix = ":i=" + std::to_string(i);
        rows.push_back(residual_row("identities", sys.id, "az:theta-p" + suffix, point_index, {},
                                    tp / outer, budgets::avg_zero_tol, ms));
        rows.push_back(residual_row("identities", sys.id, "az:theta-q" + suffix, point_index, {},
                                    tq / outer, budgets::avg_zero_tol, ms));
        rows.push_back(residual_row("identities", sys.id, "ah3:dJ-p" + suffix, point_index, {},
                                    jp / outer, budgets::avg_zero_tol, ms));
        rows.push_back(residual_row("identities", sys.id, "ah3:dJ-q" + suffix, point_index, {},
                                    jq / outer, budgets::avg_zero_tol, ms));
    }
    return rows;
}

// ---------------------------------------------------------------------------
// oracle suite
// ---------------------------------------------------------------------------

Mat2 random_generator_matrix(Rng& rng) {
    const double a = rng.range(-0.8, 0.8);
    const double c = rng.range(0.5, 1.8);
    Mat2 m;
    m << a, -(1.0 + a * a) / c, c, -a;
    return m;
}

Mat2 random_tracefree(Rng& rng) {
    Mat2 m;
    const double a = rng.range(-1.0, 1.0);
    m << a, rng.range(-1.0, 1.0), rng.range(-1.0, 1.0), -a;
    return m;
}

Vec2 random_shell_point(Rng& rng, const Mat2& a) {
    const double phi = rng.range(0.0, two_pi);
    const double level = rng.range(0.5, 2.0);
    Vec2 w(std::cos(phi), std::sin(phi));
    return w * std::sqrt(level / q_form(a, w));
}

std::vector<ResultRow> oracle_identity_trials(const std::string& system_id, std::uint64_t seed,
                                              int n_trials, int nodes) {
    std::vector<ResultRow> rows;
    Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<double> fb(nodes), fc(nodes), fbc(nodes);
    for (int trial = 0; trial < n_trials; ++trial) {
        const Mat2 a = random_generator_matrix(rng);
        const Mat2 b = random_tracefree(rng);
        const Mat2 c = random_tracefree(rng);
        const Vec2 z = random_shell_point(rng, a);

        StopWatch sw;
        for (int j = 0; j < nodes; ++j) {
            const Vec2 zt = sl2_exact_flow(a, two_pi * j / nodes, z);
            fb[j] = q_form(b, zt);
            fc[j] = q_form(c, zt);
            fbc[j] = fb[j] * fc[j];
        }
        const double q1 = fourier::mean(fb) - q_form(avg_Q(a, b), z);
        const double q2 = fourier::s_at_base(fb) - q_form(s_Q(a, b), z);
        const double q3 = fourier::mean(fbc) - avg_QQ(a, b, c, z);
        const double ms = sw.ms() / 3.0;
        rows.push_back(residual_row("oracle", system_id, "q1", trial, {}, q1,
                                    budgets::oracle_q1_tol, ms));
        rows.push_back(residual_row("oracle", system_id, "q2", trial, {}, q2,
                                    budgets::oracle_q2_tol, ms));
        rows.push_back(residual_row("oracle", system_id, "q3", trial, {}, q3,
                                    budgets::oracle_q3_tol, ms));
    }
    return rows;
}

std::vector<ResultRow> oracle_cross_at_point(const SlowFastSystem& sys, const PhasePoint& m,
                                             int point_index, const OrbitConfig& cfg, double eps) {
    std::vector<ResultRow> rows;
    const QuadraticSystem& qs = *sys.quadratic;
    for (int i = 0; i < sys.k; ++i) {
        StopWatch sw;
        auto [tp, tq] = theta(sys, m, i, cfg);
        auto [cp, cq] = closed_theta(qs, m, i);
        const double ms = sw.ms() / 2.0;
        const std::string suffix = ":i=" + std::to_string(i);
        rows.push_back(residual_row("oracle", sys.id, "theta-p-cross" + suffix, point_index, {},
                                    tp - cp, budgets::oracle_cross_tol, ms));
        rows.push_back(residual_row("oracle", sys.id, "theta-q-cross" + suffix, point_index, {},
                                    tq - cq, budgets::oracle_cross_tol, ms));
    }
    {
        StopWatch sw;
        const double v = averaged_K(sys, m, cfg) - closed_K_avg(qs, m);
        rows.push_back(residual_row("oracle", sys.id, "kavg-cross", point_index, {}, v,
                                    budgets::oracle_cross_tol, sw.ms()));
    }
    {
        StopWatch sw;
        const double v = approx_integral_F(sys, eps, m, cfg) - closed_F(qs, eps, m);
        rows.push_back(residual_row("oracle", sys.id, "f-cross", point_index, eps, v,
                                    budgets::oracle_cross_tol, sw.ms()));
    }
    {
        StopWatch sw;
        const double v = g_factor(sys, m, cfg) - closed_g(qs, m);
        rows.push_back(residual_row("oracle", sys.id, "g-cross", point_index, {}, v,
                                    budgets::oracle_cross_tol, sw.ms()));
    }
    return rows;
}

// ---------------------------------------------------------------------------
// normal-form suite
// ---------------------------------------------------------------------------

std::vector<ResultRow> normal_form_at_point(const SlowFastSystem& sys, const PhasePoint& m,
                                            int point_index, const OrbitConfig& cfg,
                                            double* renorm_value) {
    std::vector<ResultRow> rows;
    {
        StopWatch sw;
        const double v = main1_residual(sys, m, cfg);
        rows.push_back(
            residual_row("normal-form", sys.id, "main1-residual", point_index, {}, v,
                         budgets::main1_tol, sw.ms()));
    }
    {
        StopWatch sw;
        const double v = adi_check(sys, m, cfg);
        rows.push_back(
            residual_row("normal-form", sys.id, "adi", point_index, {}, v, budgets::adi_tol, sw.ms()));
    }
    {
        ScalarField renorm{[](const PhasePoint& mm) { return mm.q(0) * mm.q(0); }, nullptr};
        *renorm_value = adi_check(sys, m, cfg, &renorm);
    }
    return rows;
}

// ---------------------------------------------------------------------------
// drift suite
// ---------------------------------------------------------------------------

std::vector<ResultRow> drift_at_point(const SlowFastSystem& sys, const PhasePoint& m,
                                      int point_index, const OrbitConfig& cfg,
                                      const std::vector<double>& ladder, double horizon_c) {
    std::vector<ResultRow> rows;
    std::vector<std::pair<double, double>> j_drift, f_drift;
    const double inf = std::numeric_limits<double>::infinity();
    for (double eps : ladder) {
        StopWatch sw;
        const DriftRunResult run = drift_run(sys, eps, m, horizon_c, cfg);
        const double ms = sw.ms() / 4.0;
        rows.push_back(residual_row("drift", sys.id, "energy-drift", point_index, eps,
                                    run.H.max_drift, budgets::energy_drift_tol, ms));
        rows.push_back(make_row("drift", sys.id, "maxdrift-J", point_index, eps, run.J.max_drift,
                                inf, !run.truncated, ms));
        rows.push_back(make_row("drift", sys.id, "maxdrift-F", point_index, eps, run.F.max_drift,
                                inf, !run.truncated, ms));
        rows.push_back(make_row("drift", sys.id, "f-vs-j-ratio", point_index, eps,
                                run.F.max_drift / run.J.max_drift, 1.0,
                                run.F.max_drift < run.J.max_drift, ms));
        j_drift.emplace_back(eps, run.J.max_drift);
        f_drift.emplace_back(eps, run.F.max_drift);
    }
    StopWatch sw;
    const double slope_j = fit_loglog_slope(j_drift);
    const double slope_f = fit_loglog_slope(f_drift);
    rows.push_back(make_row("drift", sys.id, "slope-J", point_index, {}, slope_j,
                            budgets::slope_band, std::abs(slope_j - 1.0) <= budgets::slope_band,
                            sw.ms()));
    rows.push_back(make_row("drift", sys.id, "slope-F", point_index, {}, slope_f,
                            budgets::slope_band, std::abs(slope_f - 2.0) <= budgets::slope_band,
                            sw.ms()));
    return rows;
}

// ---------------------------------------------------------------------------
// config parsing
// ---------------------------------------------------------------------------

void require_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [key, _] : j.items()) {
        if (!allowed.count(key))
            throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

IntegratorConfig parse_integrator(const json& j) {
    require_keys(j, {"substeps_per_node", "closure_tol", "force_numeric", "rtol", "atol",
                     "period_max_time"},
                 "integrator");
    IntegratorConfig cfg;
    if (j.contains("substeps_per_node")) cfg.substeps_per_node = j.at("substeps_per_node").get<int>();
    if (j.contains("closure_tol")) cfg.closure_tol = j.at("closure_tol").get<double>();
    if (j.contains("force_numeric")) cfg.force_numeric = j.at("force_numeric").get<bool>();
    if (j.contains("rtol")) cfg.rtol = j.at("rtol").get<double>();
    if (j.contains("atol")) cfg.atol = j.at("atol").get<double>();
    if (j.contains("period_max_time")) cfg.period_max_time = j.at("period_max_time").get<double>();
    if (cfg.substeps_per_node < 1 || cfg.closure_tol <= 0 || cfg.rtol <= 0 || cfg.atol <= 0 ||
        cfg.period_max_time <= 0)
        throw ConfigError("integrator: steps and tolerances must be positive");
    return cfg;
}

}  // namespace

ExperimentConfig parse_config_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    require_keys(j,
                 {"system_id", "system_params", "initial_points", "n_points", "eps_ladder",
                  "quadrature_N", "integrator", "horizon_c", "suites", "seed", "output_path"},
                 "config");

    ExperimentConfig cfg;
    if (!j.contains("system_id")) throw ConfigError("config: system_id is required");
    cfg.system_id = j.at("system_id").get<std::string>();

    if (j.contains("system_params")) {
        for (const auto& [key, val] : j.at("system_params").items()) {
            if (!val.is_number()) throw ConfigError("system_params values must be numbers");
            cfg.system_params[key] = val.get<double>();
        }
    }
    if (j.contains("initial_points")) {
        for (const auto& pt : j.at("initial_points")) {
            if (!pt.is_array() || pt.empty())
                throw ConfigError("initial_points entries must be non-empty arrays");
            Eigen::VectorXd v(pt.size());
            for (size_t i = 0; i < pt.size(); ++i) v(i) = pt[i].get<double>();
            cfg.initial_points.push_back(std::move(v));
        }
    }
    if (j.contains("n_points")) cfg.n_points = j.at("n_points").get<int>();
    if (cfg.n_points < 1) throw ConfigError("n_points must be >= 1");

    if (j.contains("eps_ladder")) {
        cfg.eps_ladder.clear();
        for (const auto& e : j.at("eps_ladder")) cfg.eps_ladder.push_back(e.get<double>());
        for (size_t i = 0; i < cfg.eps_ladder.size(); ++i) {
            if (cfg.eps_ladder[i] <= 0) throw ConfigError("eps_ladder entries must be positive");
            if (i > 0 && cfg.eps_ladder[i] >= cfg.eps_ladder[i - 1])
                throw ConfigError("eps_ladder must be strictly decreasing");
        }
    }
    if (j.contains("quadrature_N")) cfg.quadrature_N = j.at("quadrature_N").get<int>();
    if (cfg.quadrature_N < 32 || cfg.quadrature_N % 2 != 0)
        throw ConfigError("quadrature_N must be even and >= 32");

    if (j.contains("integrator")) cfg.integrator = parse_integrator(j.at("integrator"));
    if (j.contains("horizon_c")) cfg.horizon_c = j.at("horizon_c").get<double>();
    if (cfg.horizon_c <= 0) throw ConfigError("horizon_c must be positive");

    if (j.contains("suites")) {
        cfg.suites.clear();
        for (const auto& s : j.at("suites")) {
            const std::string name = s.get<std::string>();
            if (!known_suites.count(name)) throw ConfigError("unknown suite '" + name + "'");
            cfg.suites.push_back(name);
        }
        if (cfg.suites.empty()) throw ConfigError("suites must not be empty");
    }
    const bool wants_drift =
        std::find(cfg.suites.begin(), cfg.suites.end(), "drift") != cfg.suites.end();
    if (wants_drift && cfg.eps_ladder.size() < 3)
        throw ConfigError("drift suite needs an eps_ladder with at least 3 entries");

    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("output_path")) cfg.output_path = j.at("output_path").get<std::string>();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_config_json(text);
}

std::vector<PhasePoint> generate_points(const SlowFastSystem& sys, int n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<PhasePoint> out;
    const long max_attempts = 200L * n;
    long attempts = 0;
    while (static_cast<int>(out.size()) < n && attempts < max_attempts) {
        ++attempts;
        Eigen::VectorXd p(sys.k), q(sys.k);
        for (int i = 0; i < sys.k; ++i) p(i) = rng.range(-0.75, 0.75);
        for (int i = 0; i < sys.k; ++i) q(i) = rng.range(-0.75, 0.75);
        const double level = rng.range(0.5, 2.0);

        PhasePoint m;
        if (sys.quadratic && sys.r == 1) {
            const double phi = rng.range(0.0, two_pi);
            m = PhasePoint(0.0, 0.0, 0.0, 0.0);
            m.p = p;
            m.q = q;
            const Mat2 a = sys.quadratic->A_at(m);
            const Vec2 w(std::cos(phi), std::sin(phi));
            const Vec2 z = w * std::sqrt(level / q_form(a, w));
            m.y(0) = z(0);
            m.x(0) = z(1);
        } else {
            // uniform direction on the fast sphere, scaled to action level
            Eigen::VectorXd dir(2 * sys.r);
            double norm2 = 0.0;
            do {
                for (int i = 0; i < 2 * sys.r; ++i) dir(i) = rng.range(-1.0, 1.0);
                norm2 = dir.squaredNorm();
            } while (norm2 < 1e-4 || norm2 > 1.0);
            dir *= std::sqrt(2.0 * level / norm2);
            m = PhasePoint(Eigen::VectorXd(dir.segment(0, sys.r)),
                           Eigen::VectorXd(dir.segment(sys.r, sys.r)), p, q);
        }
        if (sys.admissible(m)) out.push_back(std::move(m));
    }
    if (static_cast<int>(out.size()) < n)
        throw SamplingError("rejection sampling failed to produce enough admissible points");
    return out;
}

double fit_loglog_slope(const std::vector<std::pair<double, double>>& eps_value) {
    if (eps_value.size() < 2) throw std::invalid_argument("slope fit needs at least 2 points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(eps_value.size());
    for (const auto& [eps, val] : eps_value) {
        if (!(eps > 0) || !(val > 0)) throw NumericsError("slope fit needs positive data");
        const double lx = std::log(eps), ly = std::log(val);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::string result_csv_header() {
    return "suite,system_id,check_id,point_index,eps,value,tolerance,pass,wall_time_ms";
}

namespace {

std::string format_row(const ResultRow& r) {
    char buf[64];
    // ids never contain commas, so no escaping is needed
    std::string out = r.suite + "," + r.system_id + "," + r.check_id + ",";
    if (r.point_index >= 0) out += std::to_string(r.point_index);
    out += ",";
    if (r.eps.has_value()) {
        std::snprintf(buf, sizeof buf, "%.6g", *r.eps);
        out += buf;
    }
    out += ",";
    std::snprintf(buf, sizeof buf, "%.12e", r.value);
    out += buf;
    out += ",";
    if (std::isfinite(r.tolerance)) {
        std::snprintf(buf, sizeof buf, "%.6g", r.tolerance);
        out += buf;
    }
    out += ",";
    out += r.pass ? "true" : "false";
    out += ",";
    std::snprintf(buf, sizeof buf, "%.3f", r.wall_ms);
    out += buf;
    return out;
}

void run_parallel(std::vector<std::function<void()>>& tasks, int jobs) {
    jobs = std::max(1, jobs);
    if (jobs == 1) {
        for (auto& t : tasks) t();
        return;
    }
    std::atomic<size_t> next{0};
    auto worker = [&] {
        size_t i;
        while ((i = next.fetch_add(1)) < tasks.size()) tasks[i]();
    };
    std::vector<std::thread> threads;
    for (int i = 0; i < jobs - 1; ++i) threads.emplace_back(worker);
    worker();
    for (auto& t : threads) t.join();
}

}  // namespace

int run_experiment(const ExperimentConfig& config, const std::string& out_dir, int jobs) {
    const SlowFastSystem sys = make_system(config.system_id, config.system_params);

    std::vector<PhasePoint> points;
    if (!config.initial_points.empty()) {
        for (const auto& flat : config.initial_points) {
            if (flat.size() != 2 * sys.r + 2 * sys.k)
                throw ConfigError("initial point has wrong dimension for system '" +
                                  config.system_id + "'");
            PhasePoint m = PhasePoint::from_flat(sys.r, sys.k, flat);
            if (!sys.admissible(m)) throw ConfigError("initial point fails the domain guard");
            points.push_back(std::move(m));
        }
    } else {
        points = generate_points(sys, config.n_points, config.seed);
    }

    OrbitConfig orbit_cfg;
    orbit_cfg.nodes = config.quadrature_N;
    orbit_cfg.integrator = config.integrator;

    const auto wants = [&](const char* name) {
        return std::find(config.suites.begin(), config.suites.end(), name) != config.suites.end();
    };
    if (wants("oracle") && !sys.quadratic)
        throw ConfigError("oracle suite requires a quadratic-case system");

    std::deque<std::vector<ResultRow>> buckets;  // stable addresses for the tasks
    std::vector<std::function<void()>> tasks;
    auto add_task = [&](std::function<std::vector<ResultRow>()> fn, const std::string& suite,
                        int point_index) {
        buckets.emplace_back();
        auto* bucket = &buckets.back();
        std::string system_id = sys.id;
        tasks.push_back([fn = std::move(fn), bucket, suite, system_id, point_index] {
            StopWatch sw;
            try {
                *bucket = fn();
            } catch (const std::exception& e) {
                // runtime failures become failed rows, not crashes
                bucket->push_back(make_row(suite, system_id, std::string("error:") + e.what(),
                                           point_index, {}, 0.0, 0.0, false, sw.ms()));
            }
        });
    };

    std::vector<double> renorm_values(points.size(), 0.0);
    for (size_t i = 0; i < points.size(); ++i) {
        const PhasePoint m = points[i];
        const int idx = static_cast<int>(i);
        if (wants("identities"))
            add_task([=, &sys] { return identities_at_point(sys, m, idx, orbit_cfg); },
                     "identities", idx);
        if (wants("oracle"))
            add_task([=, &sys] {
                const double eps = config.eps_ladder.empty() ? 0.05 : config.eps_ladder.front();
                return oracle_cross_at_point(sys, m, idx, orbit_cfg, eps);
            }, "oracle", idx);
        if (wants("normal-form"))
            add_task([=, &sys, &renorm_values] {
                return normal_form_at_point(sys, m, idx, orbit_cfg, &renorm_values[i]);
            }, "normal-form", idx);
        if (wants("drift"))
            add_task([=, &sys] {
                return drift_at_point(sys, m, idx, orbit_cfg, config.eps_ladder, config.horizon_c);
            }, "drift", idx);
    }
    if (wants("oracle"))
        add_task([&] { return oracle_identity_trials(sys.id, config.seed, 100, orbit_cfg.nodes); },
                 "oracle", -1);

    run_parallel(tasks, jobs);

    std::vector<ResultRow> rows;
    for (auto& b : buckets) rows.insert(rows.end(), b.begin(), b.end());
    if (wants("normal-form")) {
        // the renormalized momentum map must fail the first-integral check
        // somewhere: max over points, aggregated into one row
        double worst = 0.0;
        for (double v : renorm_values) worst = std::max(worst, v);
        rows.push_back(make_row("normal-form", sys.id, "adi-renorm-negative-max", -1, {}, worst,
                                1e-3, worst > 1e-3, 0.0));
    }

    std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
        auto key = [](const ResultRow& r) {
            return std::tie(r.suite, r.system_id, r.check_id, r.point_index, r.eps);
        };
        return key(a) < key(b);
    });

    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    {
        std::ofstream csv(fs::path(out_dir) / "results.csv");
        csv << result_csv_header() << "\n";
        for (const auto& r : rows) csv << format_row(r) << "\n";
    }

    bool all_pass = true;
    json summary;
    summary["system_id"] = sys.id;
    summary["n_points"] = points.size();
    json suites = json::object();
    for (const auto& r : rows) {
        if (!suites.contains(r.suite))
            suites[r.suite] = json{{"rows", 0}, {"failures", 0}, {"worst_abs_value", 0.0}};
        auto& s = suites[r.suite];
        s["rows"] = s["rows"].get<int>() + 1;
        if (!r.pass) s["failures"] = s["failures"].get<int>() + 1;
        if (std::isfinite(r.tolerance))
            s["worst_abs_value"] =
                std::max(s["worst_abs_value"].get<double>(), std::abs(r.value));
        all_pass = all_pass && r.pass;
    }
    summary["suites"] = suites;
    json slopes = json::object();
    for (const auto& r : rows) {
        if (r.check_id == "slope-J" || r.check_id == "slope-F")
            slopes[r.check_id + ":point=" + std::to_string(r.point_index)] = r.value;
    }
    summary["slopes"] = slopes;
    summary["all_pass"] = all_pass;
    summary["exit_code"] = all_pass ? 0 : 1;
    {
        std::ofstream js(fs::path(out_dir) / "summary.json");
        js << summary.dump(2) << "\n";
    }
    return all_pass ? 0 : 1;
}

}  // namespace slowfast
