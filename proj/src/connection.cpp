#include "slowfast/connection.hpp"

#include <cmath>

#include "slowfast/budgets.hpp"
#include "slowfast/errors.hpp"
#include "slowfast/fourier.hpp"

namespace slowfast {

namespace {

// stride-2 view of an orbit: a valid N/2-node orbit over the same period
OrbitSample subsample(const OrbitSample& orbit) {
    OrbitSample half;
    half.base = orbit.base;
    half.n_nodes = orbit.n_nodes / 2;
    half.closure_error = orbit.closure_error;
    half.omega_base = orbit.omega_base;
    for (int j = 0; j < orbit.n_nodes; j += 2) {
        half.states.push_back(orbit.states[j]);
        half.tangent_maps.push_back(orbit.tangent_maps[j]);
    }
    return half;
}

double k_from_tables(const OrbitTables& tables, int k, size_t j) {
    double acc = 0.0;
    for (int i = 0; i < k; ++i) {
        acc += tables.theta_p[i][j] * tables.grads[j].cq(i) -
               tables.theta_q[i][j] * tables.grads[j].cp(i);
    }
    return 0.5 * acc;
}

// 4th-order fast-variable stencil of a scalar field of the base point,
// assembled into the fast-Hamiltonian vector field (-dF/dx, dF/dy, 0, 0)
TangentVector fast_field_by_stencil(const SlowFastSystem& sys, const PhasePoint& m,
                                    const std::function<double(const PhasePoint&)>& f) {
    const double h = budgets::fd_step_fast;
    const int r = sys.r;
    Eigen::VectorXd d_dy(r), d_dx(r);
    auto deriv = [&](bool in_y, int idx) {
        auto at = [&](double dv) {
            PhasePoint mm = m;
            (in_y ? mm.y(idx) : mm.x(idx)) += dv;
            return f(mm);
        };
        return (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h);
    };
    for (int i = 0; i < r; ++i) {
        d_dy(i) = deriv(true, i);
        d_dx(i) = deriv(false, i);
    }
    TangentVector v = TangentVector::zero(r, sys.k);
    v.dy = -d_dx;
    v.dx = d_dy;
    if (!v.all_finite()) throw NumericsError("non-finite nested-difference field");
    return v;
}

}  // namespace

OrbitTables build_orbit_tables(const SlowFastSystem& sys, const OrbitSample& orbit) {
    OrbitTables t;
    const size_t n = orbit.states.size();
    t.grads.reserve(n);
    t.omegas.reserve(n);
    for (const auto& s : orbit.states) {
        t.grads.push_back(sys.grad(s));
        t.omegas.push_back(sys.omega ? sys.omega(s) : orbit.omega_base);
    }
    t.theta_p.resize(sys.k);
    t.theta_q.resize(sys.k);
    std::vector<double> u(n);
    for (int i = 0; i < sys.k; ++i) {
        for (size_t j = 0; j < n; ++j) u[j] = t.grads[j].cp(i) / t.omegas[j];
        t.theta_p[i] = fourier::s_at_nodes(u);
        for (size_t j = 0; j < n; ++j) u[j] = t.grads[j].cq(i) / t.omegas[j];
        t.theta_q[i] = fourier::s_at_nodes(u);
    }
    return t;
}

double momentum_map(const SlowFastSystem& sys, const OrbitSample& orbit) {
    double acc = 0.0;
    for (const auto& s : orbit.states) {
        const Covector g = sys.grad(s);
        const double w = sys.omega ? sys.omega(s) : orbit.omega_base;
        acc += s.y.dot(g.cy) / w;
    }
    const double j = acc / static_cast<double>(orbit.states.size());
    if (!std::isfinite(j)) throw NumericsError("non-finite momentum map");
    return j;
}

double momentum_map(const SlowFastSystem& sys, const PhasePoint& m, const OrbitConfig& cfg) {
    return momentum_map(sys, sample_orbit(sys, m, cfg));
}

std::pair<double, double> dJ_slow(const SlowFastSystem& sys, const PhasePoint& m, int i,
                                  const OrbitConfig& cfg) {
    const OrbitSample orbit = sample_orbit(sys, m, cfg);
    double mp = 0.0, mq = 0.0;
    for (const auto& s : orbit.states) {
        const Covector g = sys.grad(s);
        mp += g.cp(i);
        mq += g.cq(i);
    }
    mp /= static_cast<double>(orbit.states.size());
    mq /= static_cast<double>(orbit.states.size());
    const Covector g0 = sys.grad(m);
    const double w = orbit.omega_base;
    return {(g0.cp(i) - mp) / w, (g0.cq(i) - mq) / w};
}

std::pair<double, double> theta(const SlowFastSystem& sys, const PhasePoint& m, int i,
                                const OrbitConfig& cfg) {
    const OrbitSample orbit = sample_orbit(sys, m, cfg);
    const size_t n = orbit.states.size();
    std::vector<double> up(n), uq(n);
    for (size_t j = 0; j < n; ++j) {
        const Covector g = sys.grad(orbit.states[j]);
        const double w = sys.omega ? sys.omega(orbit.states[j]) : orbit.omega_base;
        up[j] = g.cp(i) / w;
        uq[j] = g.cq(i) / w;
    }
    return {fourier::s_at_base(up), fourier::s_at_base(uq)};
}

std::pair<TangentVector, TangentVector> horizontal_lift(const SlowFastSystem& sys,
                                                        const PhasePoint& m, int i,
                                                        const OrbitConfig& cfg) {
    // noise guard: the quadrature estimate must sit below the stencil step
    {
        const OrbitSample orbit = sample_orbit(sys, m, cfg);
        const size_t n = orbit.states.size();
        std::vector<double> up(n);
        for (size_t j = 0; j < n; ++j) {
            const Covector g = sys.grad(orbit.states[j]);
            const double w = sys.omega ? sys.omega(orbit.states[j]) : orbit.omega_base;
            up[j] = g.cp(i) / w;
        }
        const double full = fourier::s_at_base(up);
        const double half = fourier::s_at_base(fourier::half_grid(up));
        require_quadrature_budget(std::abs(full - half), budgets::fd_step_fast, cfg.noise_budget);
    }

    auto theta_p_field = [&](const PhasePoint& mm) { return theta(sys, mm, i, cfg).first; };
    auto theta_q_field = [&](const PhasePoint& mm) { return theta(sys, mm, i, cfg).second; };

    TangentVector hp = fast_field_by_stencil(sys, m, theta_p_field);
    TangentVector hq = fast_field_by_stencil(sys, m, theta_q_field);
    hp.dp(i) += 1.0;
    hq.dq(i) += 1.0;
    return {hp, hq};
}

Bivector pi_theta(const SlowFastSystem& sys, const PhasePoint& m, const OrbitConfig& cfg) {
    const int n = m.dim();
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < sys.k; ++i) {
        auto [hp, hq] = horizontal_lift(sys, m, i, cfg);
        const Eigen::VectorXd u = hp.flat(), v = hq.flat();
        w += u * v.transpose() - v * u.transpose();
    }
    return Bivector(w);
}

TangentVector v_field(const SlowFastSystem& sys, const PhasePoint& m, const OrbitConfig& cfg) {
    TangentVector v = TangentVector::zero(sys.r, sys.k);
    for (int i = 0; i < sys.k; ++i) {
        auto [tp, tq] = theta(sys, m, i, cfg);
        v.dq(i) = 0.5 * tp;
        v.dp(i) = -0.5 * tq;
    }
    return v;
}

TangentVector v_avg(const SlowFastSystem& sys, const PhasePoint& m, const OrbitConfig& cfg) {
    const OrbitSample orbit = sample_orbit(sys, m, cfg);
    const OrbitTables tables = build_orbit_tables(sys, orbit);
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(m.dim());
    for (size_t j = 0; j < orbit.states.size(); ++j) {
        TangentVector vj = TangentVector::zero(sys.r, sys.k);
        for (int i = 0; i < sys.k; ++i) {
            vj.dq(i) = 0.5 * tables.theta_p[i][j];
            vj.dp(i) = -0.5 * tables.theta_q[i][j];
        }
        acc += orbit.tangent_maps[j].partialPivLu().solve(vj.flat());
    }
    acc /= static_cast<double>(orbit.states.size());
    return TangentVector::from_flat(sys.r, sys.k, acc);
}

double correction_K(const SlowFastSystem& sys, const PhasePoint& m, const OrbitConfig& cfg) {
    const Covector g = sys.grad(m);
    double acc = 0.0;
    for (int i = 0; i < sys.k; ++i) {
        auto [tp, tq] = theta(sys, m, i, cfg);
        acc += tp * g.cq(i) - tq * g.cp(i);
    }
    return 0.5 * acc;
}

double averaged_K(const SlowFastSystem& sys, const PhasePoint& m, const OrbitConfig& cfg) {
    return averaged_K_est(sys, m, cfg).value;
}

QuadratureResult averaged_K_est(const SlowFastSystem& sys, const PhasePoint& m,
                                const OrbitConfig& cfg) {
    const OrbitSample orbit = sample_orbit(sys, m, cfg);
    const OrbitTables tables = build_orbit_tables(sys, orbit);
    double acc = 0.0;
    for (size_t j = 0; j < orbit.states.size(); ++j) acc += k_from_tables(tables, sys.k, j);
    const double full = acc / static_cast<double>(orbit.states.size());

    const OrbitSample half_orbit = subsample(orbit);
    const OrbitTables half_tables = build_orbit_tables(sys, half_orbit);
    double acc_half = 0.0;
    for (size_t j = 0; j < half_orbit.states.size(); ++j)
        acc_half += k_from_tables(half_tables, sys.k, j);
    const double half = acc_half / static_cast<double>(half_orbit.states.size());
    return {full, std::abs(full - half)};
}

double g_factor(const SlowFastSystem& sys, const PhasePoint& m, const OrbitConfig& cfg) {
    const double w = frequency(sys, m, cfg.integrator);
    const Covector dw = sys.omega_grad(m);
    double acc = 0.0;
    for (int i = 0; i < sys.k; ++i) {
        auto [tp, tq] = theta(sys, m, i, cfg);
        acc += tp * dw.cq(i) - tq * dw.cp(i);
    }
    return -acc / (2.0 * w);
}

ConnectionData connection_data(const SlowFastSystem& sys, const PhasePoint& m,
                               const OrbitConfig& cfg) {
    ConnectionData d;
    const OrbitSample orbit = sample_orbit(sys, m, cfg);
    d.J = momentum_map(sys, orbit);
    d.theta_p.resize(sys.k);
    d.theta_q.resize(sys.k);
    for (int i = 0; i < sys.k; ++i) {
        auto [tp, tq] = theta(sys, m, i, cfg);
        d.theta_p(i) = tp;
        d.theta_q(i) = tq;
        auto [hp, hq] = horizontal_lift(sys, m, i, cfg);
        d.hor_p.push_back(hp);
        d.hor_q.push_back(hq);
    }
    d.V = v_field(sys, m, cfg);
    d.K = correction_K(sys, m, cfg);
    d.K_avg = averaged_K(sys, m, cfg);
    d.g = g_factor(sys, m, cfg);
    return d;
}

}  // namespace slowfast
