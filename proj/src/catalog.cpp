#include "slowfast/catalog.hpp"

#include <cmath>

#include "slowfast/errors.hpp"
#include "slowfast/sl2.hpp"

namespace slowfast {

namespace {

double get(const std::map<std::string, double>& params, const std::map<std::string, double>& defaults,
           const std::string& key) {
    auto it = params.find(key);
    return it == params.end() ? defaults.at(key) : it->second;
}

void reject_unknown(const std::map<std::string, double>& params,
                    const std::map<std::string, double>& defaults, const std::string& id) {
    for (const auto& [key, _] : params) {
        if (!defaults.count(key)) throw ConfigError("system '" + id + "': unknown parameter '" + key + "'");
    }
}

// A(u) = [[0, -e^u], [e^{-u}, 0]]; trace-free, det 1, lower-left positive
Mat2 twist_matrix(double u) {
    Mat2 a;
    a << 0.0, -std::exp(u), std::exp(-u), 0.0;
    return a;
}

Mat2 twist_matrix_du(double u) {
    Mat2 d;
    d << 0.0, -std::exp(u), -std::exp(-u), 0.0;
    return d;
}

std::shared_ptr<QuadraticSystem> make_twist(double alpha, double beta, double mu) {
    auto qs = std::make_shared<QuadraticSystem>();
    qs->k = 1;
    auto u_of = [alpha, beta](const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
        return alpha * q(0) + beta * p(0);
    };
    qs->field.k = 1;
    qs->field.A = [u_of](const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
        return twist_matrix(u_of(p, q));
    };
    qs->field.dA_dp = {[u_of, beta](const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
        return Mat2(beta * twist_matrix_du(u_of(p, q)));
    }};
    qs->field.dA_dq = {[u_of, alpha](const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
        return Mat2(alpha * twist_matrix_du(u_of(p, q)));
    }};
    qs->h = [](const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
        return 0.5 * (p.squaredNorm() + q.squaredNorm());
    };
    qs->dh_dp = [](const Eigen::VectorXd& p, const Eigen::VectorXd&) { return p; };
    qs->dh_dq = [](const Eigen::VectorXd&, const Eigen::VectorXd& q) { return q; };
    qs->omega = [mu](const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
        return 1.0 + mu * (p.squaredNorm() + q.squaredNorm());
    };
    qs->domega_dp = [mu](const Eigen::VectorXd& p, const Eigen::VectorXd&) {
        return Eigen::VectorXd(2.0 * mu * p);
    };
    qs->domega_dq = [mu](const Eigen::VectorXd&, const Eigen::VectorXd& q) {
        return Eigen::VectorXd(2.0 * mu * q);
    };
    return qs;
}

SlowFastSystem make_osc_const(double omega0) {
    auto qs = std::make_shared<QuadraticSystem>();
    qs->k = 1;
    qs->field.k = 1;
    qs->field.A = [](const Eigen::VectorXd&, const Eigen::VectorXd&) { return sympl_unit(); };
    qs->field.dA_dp = {[](const Eigen::VectorXd&, const Eigen::VectorXd&) { return Mat2(Mat2::Zero()); }};
    qs->field.dA_dq = {[](const Eigen::VectorXd&, const Eigen::VectorXd&) { return Mat2(Mat2::Zero()); }};
    qs->h = [](const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
        return 0.5 * (p.squaredNorm() + q.squaredNorm());
    };
    qs->dh_dp = [](const Eigen::VectorXd& p, const Eigen::VectorXd&) { return p; };
    qs->dh_dq = [](const Eigen::VectorXd&, const Eigen::VectorXd& q) { return q; };
    qs->omega = [omega0](const Eigen::VectorXd&, const Eigen::VectorXd&) { return omega0; };
    qs->domega_dp = [](const Eigen::VectorXd&, const Eigen::VectorXd&) {
        return Eigen::VectorXd(Eigen::VectorXd::Zero(1));
    };
    qs->domega_dq = [](const Eigen::VectorXd&, const Eigen::VectorXd&) {
        return Eigen::VectorXd(Eigen::VectorXd::Zero(1));
    };
    SlowFastSystem sys = to_system(qs);
    sys.id = "osc-const";
    return sys;
}

// radially symmetric anharmonic fast oscillator with slow coupling:
// H = (p^2 + q^2)/2 + rho + lambda rho^2 / 2 + mu rho q, rho = (y^2 + x^2)/2.
// The fast flow rotates circles with amplitude-dependent frequency
// omega = 1 + lambda rho + mu q; the generator itself is the unit rotation.
SlowFastSystem make_anharmonic(double lambda, double mu) {
    SlowFastSystem sys;
    sys.r = 1;
    sys.k = 1;
    sys.id = "anharmonic";
    auto rho_of = [](const PhasePoint& m) { return 0.5 * (m.y.squaredNorm() + m.x.squaredNorm()); };
    sys.H = [rho_of, lambda, mu](const PhasePoint& m) {
        const double rho = rho_of(m);
        return 0.5 * (m.p.squaredNorm() + m.q.squaredNorm()) + rho + 0.5 * lambda * rho * rho +
               mu * rho * m.q(0);
    };
    sys.gradH = [rho_of, lambda, mu](const PhasePoint& m) {
        const double rho = rho_of(m);
        const double w = 1.0 + lambda * rho + mu * m.q(0);
        Covector g = Covector::zero(1, 1);
        g.cy(0) = w * m.y(0);
        g.cx(0) = w * m.x(0);
        g.cp(0) = m.p(0);
        g.cq(0) = m.q(0) + mu * rho;
        return g;
    };
    sys.omega = [rho_of, lambda, mu](const PhasePoint& m) {
        return 1.0 + lambda * rho_of(m) + mu * m.q(0);
    };
    sys.grad_omega = [lambda, mu](const PhasePoint& m) {
        Covector g = Covector::zero(1, 1);
        g.cy(0) = lambda * m.y(0);
        g.cx(0) = lambda * m.x(0);
        g.cq(0) = mu;
        return g;
    };
    sys.jac_upsilon = [](const PhasePoint& m) {
        Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(m.dim(), m.dim());
        jac(0, 1) = -1.0;
        jac(1, 0) = 1.0;
        return jac;
    };
    return sys;
}

}  // namespace

SlowFastSystem make_system(const std::string& id, const std::map<std::string, double>& params) {
    if (id == "osc-const") {
        const std::map<std::string, double> defaults{{"omega0", 1.0}};
        reject_unknown(params, defaults, id);
        const double w0 = get(params, defaults, "omega0");
        if (!(w0 > 0)) throw ConfigError("osc-const: omega0 must be positive");
        return make_osc_const(w0);
    }
    if (id == "u-twist") {
        const std::map<std::string, double> defaults{{"alpha", 0.3}};
        reject_unknown(params, defaults, id);
        SlowFastSystem sys = to_system(make_twist(get(params, defaults, "alpha"), 0.0, 0.0));
        sys.id = "u-twist";
        return sys;
    }
    if (id == "twist2") {
        const std::map<std::string, double> defaults{{"alpha", 0.3}, {"beta", 0.3}, {"mu", 0.1}};
        reject_unknown(params, defaults, id);
        SlowFastSystem sys = to_system(make_twist(get(params, defaults, "alpha"),
                                                  get(params, defaults, "beta"),
                                                  get(params, defaults, "mu")));
        sys.id = "twist2";
        return sys;
    }
    if (id == "anharmonic") {
        const std::map<std::string, double> defaults{{"lambda", 0.4}, {"mu", 0.2}};
        reject_unknown(params, defaults, id);
        return make_anharmonic(get(params, defaults, "lambda"), get(params, defaults, "mu"));
    }
    throw ConfigError("unknown system id '" + id + "'");
}

std::vector<CatalogEntry> catalog_entries() {
    return {
        {"osc-const",
         "constant-rotation oscillator H = (p^2+q^2)/2 + omega0 (y^2+x^2)/2; all connection "
         "corrections vanish",
         {{"omega0", 1.0}}},
        {"u-twist",
         "quadratic fast form with q-dependent shear A(u), u = alpha q; nontrivial connection "
         "1-form, vanishing <K>",
         {{"alpha", 0.3}}},
        {"twist2",
         "two-parameter twist u = alpha q + beta p with state-dependent frequency omega = 1 + "
         "mu (p^2+q^2); all corrections nontrivial",
         {{"alpha", 0.3}, {"beta", 0.3}, {"mu", 0.1}}},
        {"anharmonic",
         "radially symmetric anharmonic fast oscillator with amplitude-dependent frequency; "
         "exercises the generic numerical path (period detection, trivial connection)",
         {{"lambda", 0.4}, {"mu", 0.2}}},
    };
}

std::vector<std::string> catalog_ids() {
    std::vector<std::string> ids;
    for (const auto& e : catalog_entries()) ids.push_back(e.id);
    return ids;
}

}  // namespace slowfast
