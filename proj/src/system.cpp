#include "slowfast/system.hpp"

#include <cmath>

#include "slowfast/budgets.hpp"
#include "slowfast/errors.hpp"

namespace slowfast {

namespace {

Covector grad_of(const ScalarField& f, const PhasePoint& m) {
    if (f.grad) return f.grad(m);
    return fd_gradient(f.value, m, budgets::fd_step_grad);
}

}  // namespace

double SlowFastSystem::energy(const PhasePoint& m) const { return H(m); }

Covector SlowFastSystem::grad(const PhasePoint& m) const {
    Covector g = gradH ? gradH(m) : fd_gradient(H, m, budgets::fd_step_grad);
    if (!g.all_finite()) throw NumericsError("non-finite Hamiltonian gradient");
    return g;
}

Covector SlowFastSystem::omega_grad(const PhasePoint& m) const {
    if (grad_omega) return grad_omega(m);
    if (!omega) throw NumericsError("omega gradient requested but no frequency function is set");
    return fd_gradient(omega, m, budgets::fd_step_grad);
}

bool SlowFastSystem::admissible(const PhasePoint& m) const {
    if (!m.all_finite()) return false;
    if (domain_guard) return domain_guard(m);
    Covector g = gradH ? gradH(m) : fd_gradient(H, m, budgets::fd_step_grad);
    double fast_norm = std::hypot(g.cy.norm(), g.cx.norm());
    return std::isfinite(fast_norm) && fast_norm >= 1e-8;
}

void SlowFastSystem::require_admissible(const PhasePoint& m) const {
    if (!admissible(m)) throw DomainError("phase point outside the admissible domain");
}

Covector fd_gradient(const std::function<double(const PhasePoint&)>& f, const PhasePoint& m,
                     double base_step) {
    const int r = m.r(), k = m.k();
    Eigen::VectorXd v = m.flat();
    Eigen::VectorXd g(v.size());
    for (int i = 0; i < v.size(); ++i) {
        const double h = std::max(base_step, base_step * std::abs(v(i)));
        auto at = [&](double dv) {
            Eigen::VectorXd w = v;
            w(i) += dv;
            return f(PhasePoint::from_flat(r, k, w));
        };
        g(i) = (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h);
    }
    if (!g.allFinite()) throw NumericsError("non-finite finite-difference gradient");
    return Covector::from_flat(r, k, g);
}

TangentVector eval_X0(const SlowFastSystem& sys, const PhasePoint& m) {
    sys.require_admissible(m);
    Covector g = sys.grad(m);
    return {-g.cx, g.cy, Eigen::VectorXd::Zero(sys.k), Eigen::VectorXd::Zero(sys.k)};
}

TangentVector eval_X1(const SlowFastSystem& sys, const PhasePoint& m) {
    sys.require_admissible(m);
    Covector g = sys.grad(m);
    return {Eigen::VectorXd::Zero(sys.r), Eigen::VectorXd::Zero(sys.r), -g.cq, g.cp};
}

TangentVector eval_XH(const SlowFastSystem& sys, double eps, const PhasePoint& m) {
    sys.require_admissible(m);
    Covector g = sys.grad(m);
    return {-g.cx, g.cy, -eps * g.cq, eps * g.cp};
}

TangentVector fast_hamiltonian_field(const SlowFastSystem& sys, const ScalarField& f,
                                     const PhasePoint& m) {
    Covector g = grad_of(f, m);
    return {-g.cx, g.cy, Eigen::VectorXd::Zero(sys.k), Eigen::VectorXd::Zero(sys.k)};
}

double bracket_fast(const SlowFastSystem&, const ScalarField& f, const ScalarField& g,
                    const PhasePoint& m) {
    Covector df = grad_of(f, m);
    Covector dg = grad_of(g, m);
    double b = df.cy.dot(dg.cx) - df.cx.dot(dg.cy);
    if (!std::isfinite(b)) throw NumericsError("non-finite fast bracket");
    return b;
}

double bracket_slow(const SlowFastSystem&, const ScalarField& f, const ScalarField& g,
                    const PhasePoint& m) {
    Covector df = grad_of(f, m);
    Covector dg = grad_of(g, m);
    double b = df.cp.dot(dg.cq) - df.cq.dot(dg.cp);
    if (!std::isfinite(b)) throw NumericsError("non-finite slow bracket");
    return b;
}

}  // namespace slowfast
