#include "slowfast/normal_form.hpp"

#include <boost/numeric/odeint.hpp>
#include <cmath>

#include "slowfast/budgets.hpp"
#include "slowfast/errors.hpp"
#include "slowfast/fourier.hpp"

namespace slowfast {

namespace {

struct DomainExit {
    double t;
};

double directional_derivative(const std::function<double(const PhasePoint&)>& f,
                              const PhasePoint& m, const TangentVector& v) {
    const double vnorm = v.norm();
    if (vnorm == 0.0) return 0.0;
    const Eigen::VectorXd dir = v.flat() / vnorm;
    const Eigen::VectorXd base = m.flat();
    const double h = budgets::fd_step_dir;
    auto at = [&](double s) {
        return f(PhasePoint::from_flat(m.r(), m.k(), base + s * dir));
    };
    const double d = (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h);
    return vnorm * d;
}

}  // namespace

TangentVector p_hor(const SlowFastSystem& sys, const PhasePoint& m, const OrbitConfig& cfg) {
    const Bivector w = pi_theta(sys, m, cfg);
    return w.interior(sys.r, sys.k, sys.grad(m));
}

TangentVector p_ver(const SlowFastSystem& sys, const PhasePoint& m, const OrbitConfig& cfg) {
    const QuadratureResult base = averaged_K_est(sys, m, cfg);
    require_quadrature_budget(base.err_est, budgets::fd_step_fast, cfg.noise_budget);

    const double h = budgets::fd_step_fast;
    Eigen::VectorXd d_dy(sys.r), d_dx(sys.r);
    auto deriv = [&](bool in_y, int idx) {
        auto at = [&](double dv) {
            PhasePoint mm = m;
            (in_y ? mm.y(idx) : mm.x(idx)) += dv;
            return averaged_K(sys, mm, cfg);
        };
        return (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h);
    };
    for (int i = 0; i < sys.r; ++i) {
        d_dy(i) = deriv(true, i);
        d_dx(i) = deriv(false, i);
    }
    TangentVector v = TangentVector::zero(sys.r, sys.k);
    v.dy = -d_dx;
    v.dx = d_dy;
    if (!v.all_finite()) throw NumericsError("non-finite vertical component");
    return v;
}

NormalFormSplit normal_form_split(const SlowFastSystem& sys, const PhasePoint& m,
                                  const OrbitConfig& cfg) {
    NormalFormSplit s;
    const OrbitSample orbit = sample_orbit(sys, m, cfg);
    VectorField x1{[&](const PhasePoint& mm) { return eval_X1(sys, mm); }};
    s.X1_avg = average_vector_field(sys, x1, orbit);
    s.P_hor = p_hor(sys, m, cfg);
    s.P_ver = p_ver(sys, m, cfg);
    // Coefficient of the fast field in the splitting. The invariant form is
    // -(1/omega) L_{<V>} omega with <V> the pullback-averaged auxiliary field;
    // the pointwise expression of g_factor is its integrand and does not
    // close the identity (it averages to this value along the orbit).
    const double w = frequency(sys, m, cfg.integrator);
    s.g = -sys.omega_grad(m).pair(v_avg(sys, m, cfg)) / w;
    const TangentVector defect =
        s.X1_avg - s.P_hor - s.P_ver - eval_X0(sys, m) * s.g;
    s.residual = defect.norm();
    return s;
}

double main1_residual(const SlowFastSystem& sys, const PhasePoint& m, const OrbitConfig& cfg) {
    return normal_form_split(sys, m, cfg).residual;
}

double adi_check(const SlowFastSystem& sys, const PhasePoint& m, const OrbitConfig& cfg,
                 const ScalarField* renorm) {
    const OrbitSample orbit = sample_orbit(sys, m, cfg);
    VectorField x1{[&](const PhasePoint& mm) { return eval_X1(sys, mm); }};
    const TangentVector v = average_vector_field(sys, x1, orbit);
    auto j_field = [&](const PhasePoint& mm) {
        double j = momentum_map(sys, mm, cfg);
        if (renorm) j += renorm->value(mm);
        return j;
    };
    return std::abs(directional_derivative(j_field, m, v));
}

std::pair<double, double> invariants_JF(const SlowFastSystem& sys, double eps, const PhasePoint& m,
                                        const OrbitConfig& cfg) {
    const OrbitSample orbit = sample_orbit(sys, m, cfg);
    const OrbitTables tables = build_orbit_tables(sys, orbit);
    const size_t n = orbit.states.size();

    double j = 0.0;
    for (size_t i = 0; i < n; ++i)
        j += orbit.states[i].y.dot(tables.grads[i].cy) / tables.omegas[i];
    j /= static_cast<double>(n);

    // {H, J}_1 along the orbit, with dJ/d(slow) from the single-orbit relation
    Eigen::VectorXd mean_p = Eigen::VectorXd::Zero(sys.k), mean_q = Eigen::VectorXd::Zero(sys.k);
    for (size_t i = 0; i < n; ++i) {
        mean_p += tables.grads[i].cp;
        mean_q += tables.grads[i].cq;
    }
    mean_p /= static_cast<double>(n);
    mean_q /= static_cast<double>(n);

    std::vector<double> w(n);
    for (size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int c = 0; c < sys.k; ++c) {
            const double jp = (tables.grads[i].cp(c) - mean_p(c)) / tables.omegas[i];
            const double jq = (tables.grads[i].cq(c) - mean_q(c)) / tables.omegas[i];
            acc += tables.grads[i].cp(c) * jq - tables.grads[i].cq(c) * jp;
        }
        w[i] = acc;
    }
    const double f = j - eps / tables.omegas[0] * fourier::s_at_base(w);
    return {j, f};
}

double approx_integral_F(const SlowFastSystem& sys, double eps, const PhasePoint& m,
                         const OrbitConfig& cfg) {
    return invariants_JF(sys, eps, m, cfg).second;
}

DriftRunResult drift_run(const SlowFastSystem& sys, double eps, const PhasePoint& m0,
                         double horizon_c, const OrbitConfig& cfg, int n_samples) {
    namespace odeint = boost::numeric::odeint;
    sys.require_admissible(m0);
    const double horizon = (eps > 0.0) ? horizon_c / eps : horizon_c;
    if (n_samples < 2) throw std::invalid_argument("drift_run: need at least 2 samples");

    using state_t = std::vector<double>;
    const int dim = m0.dim();
    auto rhs = [&](const state_t& z, state_t& dz, double) {
        Eigen::Map<const Eigen::VectorXd> zv(z.data(), dim);
        const PhasePoint m = PhasePoint::from_flat(sys.r, sys.k, zv);
        const Covector g = sys.grad(m);
        Eigen::VectorXd v(dim);
        v.segment(0, sys.r) = -g.cx;
        v.segment(sys.r, sys.r) = g.cy;
        v.segment(2 * sys.r, sys.k) = -eps * g.cq;
        v.segment(2 * sys.r + sys.k, sys.k) = eps * g.cp;
        dz.assign(v.data(), v.data() + dim);
    };

    std::vector<double> times(n_samples);
    for (int i = 0; i < n_samples; ++i) times[i] = horizon * i / (n_samples - 1);

    std::vector<std::pair<double, PhasePoint>> trace;
    trace.reserve(n_samples);
    auto observer = [&](const state_t& z, double t) {
        Eigen::Map<const Eigen::VectorXd> zv(z.data(), dim);
        PhasePoint m = PhasePoint::from_flat(sys.r, sys.k, zv);
        if (!sys.admissible(m)) throw DomainExit{t};
        trace.emplace_back(t, std::move(m));
    };

    DriftRunResult out;
    state_t z(dim);
    {
        const Eigen::VectorXd z0 = m0.flat();
        z.assign(z0.data(), z0.data() + dim);
    }
    auto stepper = odeint::make_controlled<odeint::runge_kutta_dopri5<state_t>>(cfg.integrator.atol,
                                                                                cfg.integrator.rtol);
    try {
        odeint::integrate_times(stepper, rhs, z, times.begin(), times.end(),
                                std::min(1e-3, horizon / 1000.0), observer);
    } catch (const DomainExit& e) {
        out.truncated = true;
        out.exit_time = e.t;
    }
    if (trace.empty()) throw DomainError("drift run left the domain at the initial point");

    auto make_report = [&](const std::string& name) {
        DriftReport r;
        r.eps = eps;
        r.horizon = horizon;
        r.quantity = name;
        return r;
    };
    out.J = make_report("J");
    out.F = make_report("F");
    out.H = make_report("H");

    for (const auto& [t, m] : trace) {
        const auto [j, f] = invariants_JF(sys, eps, m, cfg);
        out.J.samples.emplace_back(t, j);
        out.F.samples.emplace_back(t, f);
        out.H.samples.emplace_back(t, sys.H(m));
    }
    for (DriftReport* r : {&out.J, &out.F, &out.H}) {
        const double v0 = r->samples.front().second;
        double worst = 0.0;
        for (const auto& [t, v] : r->samples) worst = std::max(worst, std::abs(v - v0));
        r->max_drift = worst;
    }
    return out;
}

}  // namespace slowfast
