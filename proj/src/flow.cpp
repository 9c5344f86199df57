#include "slowfast/flow.hpp"

#include <cmath>
#include <numbers>

#include "slowfast/budgets.hpp"
#include "slowfast/errors.hpp"
#include "slowfast/sl2.hpp"

namespace slowfast {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

Eigen::VectorXd upsilon_flat(const SlowFastSystem& sys, const Eigen::VectorXd& z) {
    PhasePoint m = PhasePoint::from_flat(sys.r, sys.k, z);
    Covector g = sys.grad(m);
    const double w = sys.omega(m);
    if (!(w > 0.0) || !std::isfinite(w)) throw DomainError("frequency not positive along trajectory");
    Eigen::VectorXd v = Eigen::VectorXd::Zero(z.size());
    v.segment(0, sys.r) = -g.cx / w;
    v.segment(sys.r, sys.r) = g.cy / w;
    return v;
}

Eigen::VectorXd x0_flat(const SlowFastSystem& sys, const Eigen::VectorXd& z) {
    PhasePoint m = PhasePoint::from_flat(sys.r, sys.k, z);
    Covector g = sys.grad(m);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(z.size());
    v.segment(0, sys.r) = -g.cx;
    v.segment(sys.r, sys.r) = g.cy;
    return v;
}

Eigen::MatrixXd jac_upsilon_at(const SlowFastSystem& sys, const Eigen::VectorXd& z) {
    if (sys.jac_upsilon) return sys.jac_upsilon(PhasePoint::from_flat(sys.r, sys.k, z));
    // 4th-order column-wise differences of the generator
    const auto n = z.size();
    Eigen::MatrixXd jac(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double h = std::max(budgets::fd_step_grad, budgets::fd_step_grad * std::abs(z(j)));
        Eigen::VectorXd zp = z, zm = z, zp2 = z, zm2 = z;
        zp(j) += h;
        zm(j) -= h;
        zp2(j) += 2 * h;
        zm2(j) -= 2 * h;
        jac.col(j) = (-upsilon_flat(sys, zp2) + 8 * upsilon_flat(sys, zp) - 8 * upsilon_flat(sys, zm) +
                      upsilon_flat(sys, zm2)) /
                     (12 * h);
    }
    return jac;
}

template <typename F>
void rk4_step(Eigen::VectorXd& z, double h, const F& f) {
    const Eigen::VectorXd k1 = f(z);
    const Eigen::VectorXd k2 = f(z + 0.5 * h * k1);
    const Eigen::VectorXd k3 = f(z + 0.5 * h * k2);
    const Eigen::VectorXd k4 = f(z + h * k3);
    z += (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4);
}

// one RK4 step of the state together with the variational equations
// M' = DUpsilon(z(t)) M
void rk4_step_var(const SlowFastSystem& sys, Eigen::VectorXd& z, Eigen::MatrixXd& m, double h) {
    const Eigen::VectorXd k1 = upsilon_flat(sys, z);
    const Eigen::MatrixXd g1 = jac_upsilon_at(sys, z) * m;

    const Eigen::VectorXd z2 = z + 0.5 * h * k1;
    const Eigen::VectorXd k2 = upsilon_flat(sys, z2);
    const Eigen::MatrixXd g2 = jac_upsilon_at(sys, z2) * (m + 0.5 * h * g1);

    const Eigen::VectorXd z3 = z + 0.5 * h * k2;
    const Eigen::VectorXd k3 = upsilon_flat(sys, z3);
    const Eigen::MatrixXd g3 = jac_upsilon_at(sys, z3) * (m + 0.5 * h * g2);

    const Eigen::VectorXd z4 = z + h * k3;
    const Eigen::VectorXd k4 = upsilon_flat(sys, z4);
    const Eigen::MatrixXd g4 = jac_upsilon_at(sys, z4) * (m + h * g3);

    z += (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4);
    m += (h / 6.0) * (g1 + 2 * g2 + 2 * g3 + g4);
}

bool use_exact_orbit(const SlowFastSystem& sys, const IntegratorConfig& cfg) {
    return sys.quadratic && !cfg.force_numeric;
}

void check_tangent(const Eigen::MatrixXd& m) {
    if (!m.allFinite()) throw SingularTangentError("non-finite tangent map");
    const double det = m.determinant();
    if (!(det > 0.0) || !std::isfinite(det) || std::abs(det) < 1e-8)
        throw SingularTangentError("tangent map not orientation-preserving invertible");
}

void check_node(const SlowFastSystem& sys, const PhasePoint& m) {
    if (!m.all_finite()) throw NumericsError("non-finite state along orbit");
    if (!sys.admissible(m)) throw DomainError("trajectory exited the admissible domain");
}

}  // namespace

double OrbitSample::time(int j) const { return two_pi * j / n_nodes; }

double frequency(const SlowFastSystem& sys, const PhasePoint& m, const IntegratorConfig& cfg) {
    if (sys.omega) {
        const double w = sys.omega(m);
        if (!(w > 0.0) || !std::isfinite(w)) throw DomainError("frequency not positive");
        return w;
    }
    return two_pi / find_period(sys, m, cfg);
}

TangentVector eval_upsilon(const SlowFastSystem& sys, const PhasePoint& m,
                           const IntegratorConfig& cfg) {
    const double w = frequency(sys, m, cfg);
    TangentVector v = eval_X0(sys, m);
    return v * (1.0 / w);
}

PhasePoint flow_upsilon(const SlowFastSystem& sys, const PhasePoint& m, double t,
                        const IntegratorConfig& cfg) {
    sys.require_admissible(m);
    if (t == 0.0) return m;

    PhasePoint out;
    if (use_exact_orbit(sys, cfg)) {
        const Mat2 a = sys.quadratic->A_at(m);
        const Vec2 z = sl2_exact_flow(a, t, QuadraticSystem::fast(m));
        out = m;
        out.y(0) = z(0);
        out.x(0) = z(1);
    } else if (sys.omega) {
        Eigen::VectorXd z = m.flat();
        const double h_nominal = two_pi / (256.0 * cfg.substeps_per_node);
        const int steps = std::max(4, static_cast<int>(std::ceil(std::abs(t) / h_nominal)));
        const double h = t / steps;
        auto rhs = [&](const Eigen::VectorXd& v) { return upsilon_flat(sys, v); };
        for (int s = 0; s < steps; ++s) {
            rk4_step(z, h, rhs);
            if (s % cfg.substeps_per_node == cfg.substeps_per_node - 1)
                check_node(sys, PhasePoint::from_flat(sys.r, sys.k, z));
        }
        out = PhasePoint::from_flat(sys.r, sys.k, z);
    } else {
        // no frequency function: omega is constant along the orbit, so the
        // reparametrized flow is the fast flow run for time t / omega(m)
        const double w = frequency(sys, m, cfg);
        Eigen::VectorXd z = m.flat();
        const double t_phys = t / w;
        const int steps = std::max(4, static_cast<int>(std::ceil(std::abs(t_phys) * w * 256.0 *
                                                                 cfg.substeps_per_node / two_pi)));
        const double h = t_phys / steps;
        auto rhs = [&](const Eigen::VectorXd& v) { return x0_flat(sys, v); };
        for (int s = 0; s < steps; ++s) rk4_step(z, h, rhs);
        out = PhasePoint::from_flat(sys.r, sys.k, z);
    }

    check_node(sys, out);
    if (std::abs(std::abs(t) - two_pi) < 1e-15) {
        const double err = distance(out, m);
        if (err > cfg.closure_tol)
            throw ClosureError("2pi return missed base point by " + std::to_string(err));
    }
    return out;
}

std::pair<PhasePoint, Eigen::MatrixXd> tangent_flow_upsilon(const SlowFastSystem& sys,
                                                            const PhasePoint& m, double t,
                                                            const IntegratorConfig& cfg) {
    sys.require_admissible(m);
    const int n = m.dim();
    if (t == 0.0) return {m, Eigen::MatrixXd::Identity(n, n)};

    if (use_exact_orbit(sys, cfg)) {
        const auto& qs = *sys.quadratic;
        const Mat2 a = qs.A_at(m);
        const Vec2 z0 = QuadraticSystem::fast(m);
        PhasePoint out = m;
        const Vec2 zt = sl2_exact_flow(a, t, z0);
        out.y(0) = zt(0);
        out.x(0) = zt(1);
        const double st = std::sin(t);
        Eigen::MatrixXd mat = Eigen::MatrixXd::Identity(n, n);
        mat.topLeftCorner(2, 2) = std::cos(t) * Mat2::Identity() + st * a;
        for (int i = 0; i < qs.k; ++i) {
            mat.block(0, 2 + i, 2, 1) = st * (qs.dA_dp_at(m, i) * z0);
            mat.block(0, 2 + qs.k + i, 2, 1) = st * (qs.dA_dq_at(m, i) * z0);
        }
        check_tangent(mat);
        return {out, mat};
    }

    if (!sys.omega)
        throw NumericsError("tangent flow requires an analytic frequency function");

    Eigen::VectorXd z = m.flat();
    Eigen::MatrixXd mat = Eigen::MatrixXd::Identity(n, n);
    const double h_nominal = two_pi / (256.0 * cfg.substeps_per_node);
    const int steps = std::max(4, static_cast<int>(std::ceil(std::abs(t) / h_nominal)));
    const double h = t / steps;
    for (int s = 0; s < steps; ++s) {
        rk4_step_var(sys, z, mat, h);
        if (s % cfg.substeps_per_node == cfg.substeps_per_node - 1)
            check_node(sys, PhasePoint::from_flat(sys.r, sys.k, z));
    }
    check_tangent(mat);
    return {PhasePoint::from_flat(sys.r, sys.k, z), mat};
}

OrbitSample sample_orbit(const SlowFastSystem& sys, const PhasePoint& m, int n_nodes,
                         const IntegratorConfig& cfg) {
    if (n_nodes < 8 || n_nodes % 2 != 0)
        throw std::invalid_argument("sample_orbit: need an even node count >= 8");
    sys.require_admissible(m);

    OrbitSample orbit;
    orbit.base = m;
    orbit.n_nodes = n_nodes;
    orbit.states.reserve(n_nodes);
    orbit.tangent_maps.reserve(n_nodes);
    const int n = m.dim();

    if (use_exact_orbit(sys, cfg)) {
        const auto& qs = *sys.quadratic;
        const Mat2 a = qs.A_at(m);
        const Vec2 z0 = QuadraticSystem::fast(m);
        std::vector<Mat2> dap(qs.k), daq(qs.k);
        for (int i = 0; i < qs.k; ++i) {
            dap[i] = qs.dA_dp_at(m, i);
            daq[i] = qs.dA_dq_at(m, i);
        }
        for (int j = 0; j < n_nodes; ++j) {
            if (j == 0) {
                orbit.states.push_back(m);
                orbit.tangent_maps.push_back(Eigen::MatrixXd::Identity(n, n));
                continue;
            }
            const double t = two_pi * j / n_nodes;
            const double ct = std::cos(t), st = std::sin(t);
            const Vec2 zt = (ct * Mat2::Identity() + st * a) * z0;
            PhasePoint node = m;
            node.y(0) = zt(0);
            node.x(0) = zt(1);
            check_node(sys, node);
            orbit.states.push_back(node);

            Eigen::MatrixXd mat = Eigen::MatrixXd::Identity(n, n);
            mat.topLeftCorner(2, 2) = ct * Mat2::Identity() + st * a;
            for (int i = 0; i < qs.k; ++i) {
                mat.block(0, 2 + i, 2, 1) = st * (dap[i] * z0);
                mat.block(0, 2 + qs.k + i, 2, 1) = st * (daq[i] * z0);
            }
            orbit.tangent_maps.push_back(std::move(mat));
        }
        orbit.closure_error = 0.0;
        orbit.omega_base = frequency(sys, m, cfg);
        return orbit;
    }

    if (sys.omega) {
        Eigen::VectorXd z = m.flat();
        Eigen::MatrixXd mat = Eigen::MatrixXd::Identity(n, n);
        const double h = two_pi / (static_cast<double>(n_nodes) * cfg.substeps_per_node);
        for (int j = 0; j < n_nodes; ++j) {
            if (j == 0) {
                orbit.states.push_back(m);
                orbit.tangent_maps.push_back(mat);
            } else {
                PhasePoint node = PhasePoint::from_flat(sys.r, sys.k, z);
                check_node(sys, node);
                check_tangent(mat);
                orbit.states.push_back(std::move(node));
                orbit.tangent_maps.push_back(mat);
            }
            for (int s = 0; s < cfg.substeps_per_node; ++s) rk4_step_var(sys, z, mat, h);
        }
        orbit.closure_error = (z - m.flat()).norm();
        orbit.omega_base = frequency(sys, m, cfg);
    } else {
        // no analytic frequency: integrate the fast flow over one detected
        // period; tangent maps by centered differences of the flow map
        const double period = find_period(sys, m, cfg);
        orbit.omega_base = two_pi / period;
        auto rhs = [&](const Eigen::VectorXd& v) { return x0_flat(sys, v); };

        auto node_states = [&](const PhasePoint& base, double t_total) {
            std::vector<Eigen::VectorXd> nodes;
            Eigen::VectorXd z = base.flat();
            const double hh = t_total / (static_cast<double>(n_nodes) * cfg.substeps_per_node);
            for (int j = 0; j < n_nodes; ++j) {
                nodes.push_back(z);
                for (int s = 0; s < cfg.substeps_per_node; ++s) rk4_step(z, hh, rhs);
            }
            nodes.push_back(z);  // 2pi-state for closure
            return nodes;
        };

        auto base_nodes = node_states(m, period);
        const double fd = budgets::fd_step_grad;
        std::vector<std::vector<Eigen::VectorXd>> plus(n), minus(n);
        for (int j = 0; j < n; ++j) {
            Eigen::VectorXd vp = m.flat(), vm = m.flat();
            vp(j) += fd;
            vm(j) -= fd;
            PhasePoint mp = PhasePoint::from_flat(sys.r, sys.k, vp);
            PhasePoint mm = PhasePoint::from_flat(sys.r, sys.k, vm);
            plus[j] = node_states(mp, find_period(sys, mp, cfg));
            minus[j] = node_states(mm, find_period(sys, mm, cfg));
        }
        for (int jn = 0; jn < n_nodes; ++jn) {
            PhasePoint node = (jn == 0) ? m : PhasePoint::from_flat(sys.r, sys.k, base_nodes[jn]);
            if (jn > 0) check_node(sys, node);
            orbit.states.push_back(std::move(node));
            Eigen::MatrixXd mat(n, n);
            for (int j = 0; j < n; ++j) mat.col(j) = (plus[j][jn] - minus[j][jn]) / (2 * fd);
            if (jn == 0) mat = Eigen::MatrixXd::Identity(n, n);
            check_tangent(mat);
            orbit.tangent_maps.push_back(std::move(mat));
        }
        orbit.closure_error = (base_nodes.back() - m.flat()).norm();
    }

    if (orbit.closure_error > cfg.closure_tol)
        throw ClosureError("orbit closure error " + std::to_string(orbit.closure_error) +
                           " exceeds tolerance");
    return orbit;
}

OrbitSample sample_orbit(const SlowFastSystem& sys, const PhasePoint& m, const OrbitConfig& cfg) {
    return sample_orbit(sys, m, cfg.nodes, cfg.integrator);
}

double find_period(const SlowFastSystem& sys, const PhasePoint& m, const IntegratorConfig& cfg) {
    sys.require_admissible(m);
    const Eigen::VectorXd z0 = m.flat();
    Eigen::VectorXd f0 = x0_flat(sys, z0);
    const double speed = f0.norm();
    if (speed < 1e-12) throw NoReturnError("fast flow stationary at base point");
    const Eigen::VectorXd section = f0 / speed;

    // characteristic time scale from the fast amplitude
    const double amp = std::max(1e-3, z0.segment(0, 2 * sys.r).norm());
    const double h0 = 0.02 * amp / speed;
    auto rhs = [&](const Eigen::VectorXd& v) { return x0_flat(sys, v); };
    auto s_of = [&](const Eigen::VectorXd& v) { return section.dot(v - z0); };

    Eigen::VectorXd z = z0;
    double t = 0.0;
    double s_prev = 0.0;
    const double catch_radius = 0.5 * (amp + 1.0);
    // TODO: for r > 1 the section can be hit by non-returning branches more
    // often than this catch radius filters out; a phase-distance test on the
    // full fast block would be more robust.
    while (t < cfg.period_max_time) {
        Eigen::VectorXd z_before = z;
        rk4_step(z, h0, rhs);
        t += h0;
        const double s_new = s_of(z);
        const bool near = (z - z0).norm() < catch_radius;
        if (t > 2 * h0 && s_prev < 0.0 && s_new >= 0.0 && near) {
            // bisection refinement on the crossing interval
            double lo = 0.0, hi = h0;
            Eigen::VectorXd zl = z_before;
            for (int it = 0; it < 64 && (hi - lo) > 1e-14 * t; ++it) {
                const double mid = 0.5 * (lo + hi);
                Eigen::VectorXd zm = zl;
                rk4_step(zm, mid - lo, rhs);
                if (s_of(zm) < 0.0) {
                    lo = mid;
                    zl = zm;
                } else {
                    hi = mid;
                }
            }
            const double period = t - h0 + 0.5 * (lo + hi);
            Eigen::VectorXd zc = zl;
            rk4_step(zc, 0.5 * (lo + hi) - lo, rhs);
            if ((zc - z0).norm() <= 1e-6 * (1.0 + z0.norm())) {
                if (sys.omega) {
                    const double w = sys.omega(m);
                    if (std::abs(two_pi / period - w) > 1e-6 * std::abs(w))
                        throw NumericsError("detected period disagrees with analytic frequency");
                }
                return period;
            }
        }
        s_prev = s_new;
    }
    throw NoReturnError("no periodic return within the search window");
}

}  // namespace slowfast
