#include <catch2/catch_amalgamated.hpp>
#include <numbers>

#include "slowfast/catalog.hpp"
#include "slowfast/connection.hpp"
#include "slowfast/errors.hpp"
#include "slowfast/experiment.hpp"
#include "slowfast/flow.hpp"
#include "slowfast/sl2.hpp"

using namespace slowfast;

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;
}

TEST_CASE("reparametrized flow basics", "[flow]") {
    auto sys = make_system("osc-const", {{"omega0", 1.3}});
    PhasePoint m(1.0, 0.0, 0.2, -0.1);

    SECTION("t = 0 is the identity") {
        CHECK(distance(flow_upsilon(sys, m, 0.0), m) == 0.0);
    }
    SECTION("quarter turn rotates (y, x) = (1, 0) to (0, 1)") {
        PhasePoint out = flow_upsilon(sys, m, std::numbers::pi / 2);
        CHECK(out.y(0) == Catch::Approx(0.0).margin(1e-12));
        CHECK(out.x(0) == Catch::Approx(1.0).margin(1e-12));
        CHECK(out.p(0) == m.p(0));
        CHECK(out.q(0) == m.q(0));
    }
    SECTION("numerical integration agrees with the closed-form rotation") {
        IntegratorConfig num;
        num.force_numeric = true;
        for (double t : {0.4, 1.9, 5.2}) {
            PhasePoint a = flow_upsilon(sys, m, t);
            PhasePoint b = flow_upsilon(sys, m, t, num);
            CHECK(distance(a, b) < 1e-11);
        }
    }
}

TEST_CASE("quadratic fast flow matches cos t I + sin t A numerically", "[flow][sl2]") {
    auto sys = make_system("twist2");
    PhasePoint m(0.9, -0.4, 0.3, 0.5);
    const Mat2 a = sys.quadratic->A_at(m);
    IntegratorConfig num;
    num.force_numeric = true;
    for (double t : {0.7, 2.9}) {
        const Vec2 expected = sl2_exact_flow(a, t, QuadraticSystem::fast(m));
        PhasePoint out = flow_upsilon(sys, m, t, num);
        CHECK(out.y(0) == Catch::Approx(expected(0)).margin(1e-11));
        CHECK(out.x(0) == Catch::Approx(expected(1)).margin(1e-11));
    }
}

TEST_CASE("tangent flow", "[flow]") {
    auto sys = make_system("twist2");
    PhasePoint m(0.8, 0.5, 0.35, -0.4);

    SECTION("t = 0 gives the identity map") {
        auto [out, mat] = tangent_flow_upsilon(sys, m, 0.0);
        CHECK(distance(out, m) == 0.0);
        CHECK((mat - Eigen::MatrixXd::Identity(4, 4)).norm() == 0.0);
    }
    SECTION("numeric variational map matches the closed form") {
        IntegratorConfig num;
        num.force_numeric = true;
        const double t = 1.3;
        auto [out_n, mat_n] = tangent_flow_upsilon(sys, m, t, num);
        auto [out_e, mat_e] = tangent_flow_upsilon(sys, m, t);
        CHECK(distance(out_n, out_e) < 1e-11);
        CHECK((mat_n - mat_e).norm() < 1e-9);
    }
    SECTION("cocycle property") {
        const double s = 1.1, t = 2.3;
        IntegratorConfig num;
        num.force_numeric = true;
        auto [mt, dt] = tangent_flow_upsilon(sys, m, t, num);
        auto [mst, dst] = tangent_flow_upsilon(sys, mt, s, num);
        auto [full, dfull] = tangent_flow_upsilon(sys, m, s + t, num);
        CHECK(distance(mst, full) < 1e-10);
        CHECK((dst * dt - dfull).norm() < 1e-8);
    }
    SECTION("finite-difference Jacobian fallback agrees with the analytic one") {
        SlowFastSystem fd = sys;
        fd.jac_upsilon = nullptr;
        IntegratorConfig num;
        num.force_numeric = true;
        auto [out_a, mat_a] = tangent_flow_upsilon(sys, m, 0.9, num);
        auto [out_f, mat_f] = tangent_flow_upsilon(fd, m, 0.9, num);
        CHECK(distance(out_a, out_f) < 1e-12);
        CHECK((mat_a - mat_f).norm() < 1e-8);
    }
}

TEST_CASE("orbit sampling", "[flow]") {
    SECTION("constant-A system at N = 8: states are exact rotations") {
        auto sys = make_system("osc-const");
        PhasePoint m(1.0, 0.0, 0.1, 0.2);
        auto orbit = sample_orbit(sys, m, 8, IntegratorConfig{});
        const Mat2 a = sys.quadratic->A_at(m);
        for (int j = 0; j < 8; ++j) {
            const Vec2 z = sl2_exact_flow(a, orbit.time(j), QuadraticSystem::fast(m));
            CHECK(orbit.states[j].y(0) == Catch::Approx(z(0)).margin(1e-14));
            CHECK(orbit.states[j].x(0) == Catch::Approx(z(1)).margin(1e-14));
        }
        CHECK(orbit.states[0].y(0) == m.y(0));
        CHECK((orbit.tangent_maps[0] - Eigen::MatrixXd::Identity(4, 4)).norm() == 0.0);
    }
    SECTION("cyclic shift: resampling from a node reproduces the orbit") {
        auto sys = make_system("twist2");
        PhasePoint m(0.9, 0.4, 0.3, -0.35);
        IntegratorConfig num;
        num.force_numeric = true;
        num.substeps_per_node = 32;  // N = 32 nodes needs finer substeps to close
        auto orbit = sample_orbit(sys, m, 32, num);
        auto shifted = sample_orbit(sys, orbit.states[5], 32, num);
        for (int j = 0; j < 32; ++j)
            CHECK(distance(shifted.states[j], orbit.states[(j + 5) % 32]) < 1e-8);
    }
    SECTION("closure regression for the numerically integrated oscillator") {
        auto sys = make_system("osc-const");
        PhasePoint m(1.0, 0.0, 0.1, 0.2);
        IntegratorConfig num;
        num.force_numeric = true;
        auto orbit = sample_orbit(sys, m, 256, num);
        CHECK(orbit.closure_error < 1e-10);
    }
    SECTION("too-coarse integration fails the closure gate") {
        auto sys = make_system("osc-const");
        PhasePoint m(1.0, 0.0, 0.1, 0.2);
        IntegratorConfig coarse;
        coarse.force_numeric = true;
        coarse.substeps_per_node = 1;
        coarse.closure_tol = 1e-14;
        CHECK_THROWS_AS(sample_orbit(sys, m, 32, coarse), ClosureError);
    }
    SECTION("node count must be even and at least 8") {
        auto sys = make_system("osc-const");
        PhasePoint m(1.0, 0.0, 0.1, 0.2);
        CHECK_THROWS_AS(sample_orbit(sys, m, 6, IntegratorConfig{}), std::invalid_argument);
        CHECK_THROWS_AS(sample_orbit(sys, m, 9, IntegratorConfig{}), std::invalid_argument);
    }
    SECTION("domain exit along the orbit raises") {
        auto sys = make_system("osc-const");
        sys.domain_guard = [](const PhasePoint& mm) { return mm.x(0) < 0.9; };
        PhasePoint m(1.0, 0.0, 0.1, 0.2);  // the circle passes through x = 1
        IntegratorConfig num;
        num.force_numeric = true;
        CHECK_THROWS_AS(sample_orbit(sys, m, 64, num), DomainError);
    }
}

TEST_CASE("invariants along the reparametrized flow", "[flow]") {
    for (const char* id : {"u-twist", "twist2", "anharmonic"}) {
        auto sys = make_system(id);
        auto pts = generate_points(sys, 3, 99);
        IntegratorConfig num;
        num.force_numeric = true;
        for (const auto& m : pts) {
            CHECK(distance(flow_upsilon(sys, m, two_pi, num), m) < num.closure_tol);
            for (double t : {1.0, 4.0}) {
                PhasePoint mt = flow_upsilon(sys, m, t, num);
                CHECK(std::abs(sys.H(mt) - sys.H(m)) < 1e-10);
                CHECK(std::abs(sys.omega(mt) - sys.omega(m)) < 1e-10);
            }
        }
    }
}

TEST_CASE("fast symplectic area is preserved when the slow point is frozen", "[flow]") {
    auto sys = make_system("u-twist");
    PhasePoint m(0.9, 0.4, 0.3, -0.35);
    IntegratorConfig num;
    num.force_numeric = true;
    auto [mt, mat] = tangent_flow_upsilon(sys, m, 2.1, num);
    CHECK(mat.topLeftCorner(2, 2).determinant() == Catch::Approx(1.0).margin(1e-10));
}

TEST_CASE("period detection", "[flow][period]") {
    SECTION("oscillator period is 2pi / omega0") {
        auto sys = make_system("osc-const", {{"omega0", 1.3}});
        PhasePoint m(1.0, 0.0, 0.1, 0.2);
        CHECK(find_period(sys, m) == Catch::Approx(two_pi / 1.3).epsilon(1e-8));
    }
    SECTION("quadratic system period is 2pi / omega(p, q)") {
        auto sys = make_system("twist2");
        PhasePoint m(0.9, 0.4, 0.3, -0.35);
        CHECK(find_period(sys, m) == Catch::Approx(two_pi / sys.omega(m)).epsilon(1e-6));
    }
    SECTION("doubling the frequency halves the period") {
        auto slow = make_system("osc-const", {{"omega0", 0.8}});
        auto fast = make_system("osc-const", {{"omega0", 1.6}});
        PhasePoint m(1.0, 0.0, 0.1, 0.2);
        CHECK(find_period(slow, m) / 2.0 == Catch::Approx(find_period(fast, m)).epsilon(1e-6));
    }
    SECTION("mismatch with the analytic frequency raises") {
        auto sys = make_system("osc-const", {{"omega0", 1.0}});
        sys.omega = [](const PhasePoint&) { return 1.01; };  // wrong on purpose
        sys.quadratic = nullptr;
        PhasePoint m(1.0, 0.0, 0.1, 0.2);
        CHECK_THROWS_AS(find_period(sys, m), NumericsError);
    }
    SECTION("no return within the window raises") {
        SlowFastSystem sys;  // unbounded drift in the fast plane
        sys.r = 1;
        sys.k = 1;
        sys.H = [](const PhasePoint& m) { return m.x(0); };
        sys.gradH = [](const PhasePoint&) {
            Covector g = Covector::zero(1, 1);
            g.cx(0) = 1.0;
            return g;
        };
        sys.domain_guard = [](const PhasePoint&) { return true; };
        PhasePoint m(0.0, 0.0, 0.0, 0.0);
        IntegratorConfig cfg;
        cfg.period_max_time = 50.0;
        CHECK_THROWS_AS(find_period(sys, m, cfg), NoReturnError);
    }
}

TEST_CASE("systems without an analytic frequency fall back to period detection", "[flow][period]") {
    auto osc = make_system("osc-const", {{"omega0", 1.3}});
    SlowFastSystem bare = osc;
    bare.omega = nullptr;
    bare.grad_omega = nullptr;
    bare.jac_upsilon = nullptr;
    bare.quadratic = nullptr;

    PhasePoint m(1.1, 0.2, 0.3, 0.1);
    CHECK(frequency(bare, m) == Catch::Approx(1.3).epsilon(1e-7));

    IntegratorConfig cfg;
    cfg.closure_tol = 1e-6;  // flow-map differencing dominates the closure here
    auto orbit = sample_orbit(bare, m, 64, cfg);
    CHECK(orbit.omega_base == Catch::Approx(1.3).epsilon(1e-7));
    CHECK(momentum_map(bare, orbit) ==
          Catch::Approx(0.5 * (m.y(0) * m.y(0) + m.x(0) * m.x(0))).epsilon(1e-6));
}
