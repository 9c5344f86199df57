// Acceptance suite: every release criterion as one pass/fail line.
//
//   acceptance [--only c3,c7]
//
// Exit code is the number of failed criteria. Each criterion prints the worst
// observed value against its bound, so a red line carries the evidence.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "slowfast/averaging.hpp"
#include "slowfast/budgets.hpp"
#include "slowfast/catalog.hpp"
#include "slowfast/connection.hpp"
#include "slowfast/errors.hpp"
#include "slowfast/experiment.hpp"
#include "slowfast/fourier.hpp"
#include "slowfast/normal_form.hpp"
#include "slowfast/sl2.hpp"

using namespace slowfast;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr std::uint64_t kSeed = 20250810ULL;

struct Criterion {
    std::string id;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

double directional(const std::function<double(const PhasePoint&)>& f, const PhasePoint& m,
                   const TangentVector& v) {
    const double n = v.norm();
    if (n == 0.0) return 0.0;
    const Eigen::VectorXd dir = v.flat() / n;
    const Eigen::VectorXd base = m.flat();
    const double h = budgets::fd_step_dir;
    auto at = [&](double s) { return f(PhasePoint::from_flat(m.r(), m.k(), base + s * dir)); };
    return n * (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h);
}

std::vector<ScalarField> test_fields(const SlowFastSystem& sys) {
    return {
        ScalarField{[&sys](const PhasePoint& m) { return sys.H(m) * m.p(0); }, nullptr},
        ScalarField{[](const PhasePoint& m) { return m.y(0) * m.q(0); }, nullptr},
        ScalarField{[](const PhasePoint& m) { return m.x(0) * m.x(0) * m.p(0); }, nullptr},
    };
}

std::string fmt(const char* format, double a, double b) {
    char buf[128];
    std::snprintf(buf, sizeof buf, format, a, b);
    return buf;
}

// --- c1: operator identity suite -------------------------------------------

Criterion run_c1() {
    Criterion c{"c1", "operator identities"};
    const OrbitConfig cfg;
    double worst = 0.0;
    for (const auto& entry : catalog_entries()) {
        auto sys = make_system(entry.id);
        auto pts = generate_points(sys, 50, kSeed);
        for (const auto& m : pts) {
            const OrbitSample orbit = sample_orbit(sys, m, cfg);
            for (const auto& f : test_fields(sys)) {
                ScalarField sf{[&](const PhasePoint& mm) {
                                   return s_function(sys, f, sample_orbit(sys, mm, cfg));
                               },
                               nullptr};
                const double pr1 = lie_derivative_upsilon(sys, sf, m, cfg.integrator) -
                                   (f.value(m) - average_function(sys, f, orbit));
                ScalarField lf{[&](const PhasePoint& mm) {
                                   return lie_derivative_upsilon(sys, f, mm, cfg.integrator);
                               },
                               nullptr};
                const double pr2 = average_function(sys, lf, orbit);
                double pr3 = 0.0;
                const int outer = 16;
                for (int j = 0; j < outer; ++j)
                    pr3 += s_function(sys, f,
                                      sample_orbit(sys, orbit.states[j * cfg.nodes / outer], cfg));
                pr3 /= outer;
                worst = std::max({worst, std::abs(pr1), std::abs(pr2), std::abs(pr3)});
            }
        }
    }
    c.pass = worst <= budgets::quad_identity_tol;
    c.detail = fmt("worst=%.2e bound=%.0e", worst, budgets::quad_identity_tol);
    return c;
}

// --- c2: momentum map and connection suite ----------------------------------

Criterion run_c2() {
    Criterion c{"c2", "momentum/connection identities"};
    const OrbitConfig cfg;
    double worst_avg = 0.0;   // zero-average checks, bound 1e-7
    double worst_hor = 0.0;   // lift invariants, bound 1e-6
    for (const auto& entry : catalog_entries()) {
        auto sys = make_system(entry.id);
        auto pts = generate_points(sys, 50, kSeed + 1);
        for (const auto& m : pts) {
            const OrbitSample orbit = sample_orbit(sys, m, cfg);
            const int outer = 16;
            for (int i = 0; i < sys.k; ++i) {
                double tp = 0, tq = 0, jp = 0, jq = 0;
                for (int j = 0; j < outer; ++j) {
                    const PhasePoint& node = orbit.states[j * cfg.nodes / outer];
                    auto [a, b] = theta(sys, node, i, cfg);
                    tp += a;
                    tq += b;
                    auto [dp, dq] = dJ_slow(sys, node, i, cfg);
                    jp += dp;
                    jq += dq;
                }
                worst_avg = std::max({worst_avg, std::abs(tp / outer), std::abs(tq / outer),
                                      std::abs(jp / outer), std::abs(jq / outer)});

                auto [hp, hq] = horizontal_lift(sys, m, i, cfg);
                auto j_field = [&](const PhasePoint& mm) { return momentum_map(sys, mm, cfg); };
                worst_hor = std::max({worst_hor, std::abs(directional(j_field, m, hp)),
                                      std::abs(directional(j_field, m, hq))});

                const double t = 1.7;
                auto [mt, dfl] = tangent_flow_upsilon(sys, m, t, cfg.integrator);
                auto [hpt, hqt] = horizontal_lift(sys, mt, i, cfg);
                worst_hor = std::max({worst_hor, (dfl * hp.flat() - hpt.flat()).norm(),
                                      (dfl * hq.flat() - hqt.flat()).norm()});
            }
        }
    }
    c.pass = worst_avg <= budgets::avg_zero_tol && worst_hor <= budgets::hor_invariant_tol;
    c.detail = fmt("worst_avg=%.2e worst_hor=%.2e", worst_avg, worst_hor) +
               fmt(" bounds=%.0e/%.0e", budgets::avg_zero_tol, budgets::hor_invariant_tol);
    return c;
}

// --- c3: closed-form averaging calculus -------------------------------------

Criterion run_c3() {
    Criterion c{"c3", "sl(2) averaging calculus"};
    std::mt19937_64 eng(kSeed + 2);
    auto uniform = [&](double lo, double hi) {
        return lo + (hi - lo) * (static_cast<double>(eng() >> 11) * 0x1.0p-53);
    };
    double worst_q1 = 0, worst_q2 = 0, worst_q3 = 0;
    std::vector<double> fb(256), fc(256), prod(256);
    for (int trial = 0; trial < 100; ++trial) {
        const double a = uniform(-0.8, 0.8);
        const double cc = uniform(0.5, 1.8);
        Mat2 gen;
        gen << a, -(1 + a * a) / cc, cc, -a;
        Mat2 b, cm;
        const double b11 = uniform(-1, 1), c11 = uniform(-1, 1);
        b << b11, uniform(-1, 1), uniform(-1, 1), -b11;
        cm << c11, uniform(-1, 1), uniform(-1, 1), -c11;
        const double phi = uniform(0, two_pi);
        Vec2 w(std::cos(phi), std::sin(phi));
        const Vec2 z = w * std::sqrt(uniform(0.5, 2.0) / q_form(gen, w));

        for (int j = 0; j < 256; ++j) {
            const Vec2 zt = sl2_exact_flow(gen, two_pi * j / 256, z);
            fb[j] = q_form(b, zt);
            fc[j] = q_form(cm, zt);
            prod[j] = fb[j] * fc[j];
        }
        worst_q1 = std::max(worst_q1, std::abs(fourier::mean(fb) - q_form(avg_Q(gen, b), z)));
        worst_q2 = std::max(worst_q2, std::abs(fourier::s_at_base(fb) - q_form(s_Q(gen, b), z)));
        worst_q3 = std::max(worst_q3, std::abs(fourier::mean(prod) - avg_QQ(gen, b, cm, z)));
    }
    c.pass = worst_q1 <= budgets::oracle_q1_tol && worst_q2 <= budgets::oracle_q2_tol &&
             worst_q3 <= budgets::oracle_q3_tol;
    c.detail = fmt("q1=%.2e q2=%.2e", worst_q1, worst_q2) + fmt(" q3=%.2e bound=1e-10/1e-9", worst_q3, 0.0);
    return c;
}

// --- c4: pipeline vs closed forms -------------------------------------------

Criterion run_c4() {
    Criterion c{"c4", "pipeline vs closed forms"};
    OrbitConfig cfg;
    cfg.integrator.force_numeric = true;  // quadrature route all the way down
    double worst = 0.0;
    for (const char* id : {"u-twist", "twist2"}) {
        auto sys = make_system(id);
        const auto& qs = *sys.quadratic;
        auto pts = generate_points(sys, 20, kSeed + 3);
        for (const auto& m : pts) {
            for (int i = 0; i < sys.k; ++i) {
                auto [tp, tq] = theta(sys, m, i, cfg);
                auto [cp, cq] = closed_theta(qs, m, i);
                worst = std::max({worst, std::abs(tp - cp), std::abs(tq - cq)});
            }
            worst = std::max(worst, std::abs(averaged_K(sys, m, cfg) - closed_K_avg(qs, m)));
            const double eps = 0.05;
            worst = std::max(worst,
                             std::abs(approx_integral_F(sys, eps, m, cfg) - closed_F(qs, eps, m)));
        }
    }
    c.pass = worst <= budgets::oracle_cross_tol;
    c.detail = fmt("worst=%.2e bound=%.0e", worst, budgets::oracle_cross_tol);
    return c;
}

// --- c5: splitting residual and refinement ----------------------------------

Criterion run_c5() {
    Criterion c{"c5", "splitting residual + N-refinement"};
    const OrbitConfig cfg;
    double worst = 0.0;
    for (const auto& entry : catalog_entries()) {
        auto sys = make_system(entry.id);
        auto pts = generate_points(sys, 20, kSeed + 4);
        for (const auto& m : pts) worst = std::max(worst, main1_residual(sys, m, cfg));
    }

    // refinement: force the numerical path so the error scales with N
    std::vector<double> ratios;
    for (const char* id : {"u-twist", "twist2"}) {
        auto sys = make_system(id);
        auto pts = generate_points(sys, 10, kSeed + 5);
        for (const auto& m : pts) {
            OrbitConfig c128, c256;
            c128.nodes = 128;
            c256.nodes = 256;
            for (OrbitConfig* oc : {&c128, &c256}) {
                oc->integrator.force_numeric = true;
                oc->integrator.substeps_per_node = 4;
                oc->integrator.closure_tol = 1e-4;
                oc->noise_budget = 1e-3;
            }
            ratios.push_back(main1_residual(sys, m, c128) / main1_residual(sys, m, c256));
        }
    }
    std::nth_element(ratios.begin(), ratios.begin() + ratios.size() / 2, ratios.end());
    const double median_ratio = ratios[ratios.size() / 2];

    c.pass = worst <= budgets::main1_tol && median_ratio >= 3.0;
    c.detail = fmt("worst=%.2e bound=%.0e", worst, budgets::main1_tol) +
               fmt(" median_refinement_ratio=%.1f (need >= %.0f)", median_ratio, 3.0);
    return c;
}

// --- c6: first-integral property and its negative control -------------------

Criterion run_c6() {
    Criterion c{"c6", "first integral of the averaged field"};
    const OrbitConfig cfg;
    double worst = 0.0;
    for (const auto& entry : catalog_entries()) {
        auto sys = make_system(entry.id);
        auto pts = generate_points(sys, 20, kSeed + 6);
        for (const auto& m : pts) worst = std::max(worst, adi_check(sys, m, cfg));
    }
    auto sys = make_system("twist2");
    auto pts = generate_points(sys, 20, kSeed + 6);
    ScalarField renorm{[](const PhasePoint& mm) { return mm.q(0) * mm.q(0); }, nullptr};
    double renorm_worst = 0.0;
    for (const auto& m : pts) renorm_worst = std::max(renorm_worst, adi_check(sys, m, cfg, &renorm));

    c.pass = worst <= budgets::adi_tol && renorm_worst > 1e-3;
    c.detail = fmt("worst=%.2e bound=%.0e", worst, budgets::adi_tol) +
               fmt(" renormalized=%.2e (must exceed %.0e)", renorm_worst, 1e-3);
    return c;
}

// --- c7/c8: drift orders and the energy gate --------------------------------

struct LadderResult {
    double slope_j = 0, slope_f = 0;
    bool f_below_j = true;
    double worst_energy = 0;
};

LadderResult run_ladder() {
    auto sys = make_system("twist2");
    const PhasePoint m0 = generate_points(sys, 1, kSeed + 7)[0];
    const OrbitConfig cfg;
    std::vector<std::pair<double, double>> dj, df;
    LadderResult out;
    for (double eps : {0.1, 0.05, 0.025, 0.0125}) {
        const DriftRunResult run = drift_run(sys, eps, m0, 1.0, cfg);
        dj.emplace_back(eps, run.J.max_drift);
        df.emplace_back(eps, run.F.max_drift);
        out.f_below_j = out.f_below_j && (run.F.max_drift < run.J.max_drift);
        out.worst_energy = std::max(out.worst_energy, run.H.max_drift);
    }
    out.slope_j = fit_loglog_slope(dj);
    out.slope_f = fit_loglog_slope(df);
    return out;
}

Criterion run_c7() {
    Criterion c{"c7", "adiabatic drift orders"};
    const LadderResult r = run_ladder();
    const bool slopes_ok = std::abs(r.slope_j - 1.0) <= budgets::slope_band &&
                           std::abs(r.slope_f - 2.0) <= budgets::slope_band;
    c.pass = slopes_ok && r.f_below_j;
    c.detail = fmt("slope_J=%.2f slope_F=%.2f", r.slope_j, r.slope_f) +
               (r.f_below_j ? " F<J at every ladder point" : " F-drift NOT below J-drift");
    return c;
}

Criterion run_c8() {
    Criterion c{"c8", "energy conservation gate"};
    const LadderResult r = run_ladder();
    c.pass = r.worst_energy <= budgets::energy_drift_tol;
    c.detail = fmt("worst=%.2e bound=%.0e", r.worst_energy, budgets::energy_drift_tol);
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> only;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
            std::string list = argv[++i];
            std::string item;
            for (char ch : list + ",") {
                if (ch == ',') {
                    if (!item.empty()) only.push_back(item);
                    item.clear();
                } else {
                    item += ch;
                }
            }
        } else {
            std::fprintf(stderr, "usage: acceptance [--only c1,c2,...]\n");
            return 64;
        }
    }
    auto selected = [&](const std::string& id) {
        return only.empty() || std::find(only.begin(), only.end(), id) != only.end();
    };

    using Runner = Criterion (*)();
    const std::pair<const char*, Runner> table[] = {
        {"c1", run_c1}, {"c2", run_c2}, {"c3", run_c3}, {"c4", run_c4},
        {"c5", run_c5}, {"c6", run_c6}, {"c7", run_c7}, {"c8", run_c8},
    };

    int failures = 0;
    for (const auto& [id, runner] : table) {
        if (!selected(id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Criterion c;
        try {
            c = runner();
        } catch (const std::exception& e) {
            c.id = id;
            c.name = "criterion crashed";
            c.pass = false;
            c.detail = e.what();
        }
        c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("[%s] %s %-38s %s (%.1f s)\n", c.pass ? "PASS" : "FAIL", id, c.name.c_str(),
                    c.detail.c_str(), c.seconds);
        std::fflush(stdout);
        if (!c.pass) ++failures;
    }
    return failures;
}
