#pragma once

#include <functional>
#include <memory>
#include <string>

#include "slowfast/types.hpp"

namespace slowfast {

struct QuadraticSystem;

/// A scalar field with an optional analytic gradient. When `grad` is absent,
/// consumers fall back to 4th-order central differences.
struct ScalarField {
    std::function<double(const PhasePoint&)> value;
    std::function<Covector(const PhasePoint&)> grad;
};

struct VectorField {
    std::function<TangentVector(const PhasePoint&)> value;
};

struct OneForm {
    std::function<Covector(const PhasePoint&)> value;
};

/// A slow-fast Hamiltonian system: fast variables (y, x) in R^{2r}, slow
/// variables (p, q) in R^{2k}, Hamiltonian H, and the frequency of the
/// periodic fast flow. Only `H` is mandatory; gradients fall back to finite
/// differences and a missing frequency is recovered by period detection.
struct SlowFastSystem {
    int r = 1;
    int k = 1;
    std::string id;

    std::function<double(const PhasePoint&)> H;
    std::function<Covector(const PhasePoint&)> gradH;
    std::function<double(const PhasePoint&)> omega;
    std::function<Covector(const PhasePoint&)> grad_omega;
    std::function<bool(const PhasePoint&)> domain_guard;

    /// Optional analytic Jacobian of the period-2pi generator.
    std::function<Eigen::MatrixXd(const PhasePoint&)> jac_upsilon;

    /// Set for quadratic-case systems; enables the exact-orbit fast path.
    std::shared_ptr<const QuadraticSystem> quadratic;

    double energy(const PhasePoint& m) const;
    /// Analytic gradient when supplied, 4th-order central differences otherwise.
    Covector grad(const PhasePoint& m) const;
    /// Slow gradient of omega (analytic or finite differences).
    Covector omega_grad(const PhasePoint& m) const;

    /// domain_guard if set; the default keeps fast variables away from
    /// equilibria of the fast flow (|grad_{yx} H| >= 1e-8).
    bool admissible(const PhasePoint& m) const;
    void require_admissible(const PhasePoint& m) const;
};

/// 4th-order central-difference gradient with per-coordinate step
/// h_i = max(base, base*|m_i|).
Covector fd_gradient(const std::function<double(const PhasePoint&)>& f, const PhasePoint& m,
                     double base_step);

/// Unperturbed vector field (-dH/dx, dH/dy, 0, 0).
TangentVector eval_X0(const SlowFastSystem& sys, const PhasePoint& m);

/// Perturbation vector field (0, 0, -dH/dq, dH/dp).
TangentVector eval_X1(const SlowFastSystem& sys, const PhasePoint& m);

/// Full field X0 + eps * X1.
TangentVector eval_XH(const SlowFastSystem& sys, double eps, const PhasePoint& m);

/// Fast Hamiltonian vector field of an arbitrary scalar field:
/// (-dF/dx, dF/dy, 0, 0).
TangentVector fast_hamiltonian_field(const SlowFastSystem& sys, const ScalarField& f,
                                     const PhasePoint& m);

/// Fast canonical bracket {F, G}_0 = sum_i (F_y G_x - F_x G_y).
double bracket_fast(const SlowFastSystem& sys, const ScalarField& f, const ScalarField& g,
                    const PhasePoint& m);

/// Slow canonical bracket {F, G}_1 = sum_i (F_p G_q - F_q G_p).
double bracket_slow(const SlowFastSystem& sys, const ScalarField& f, const ScalarField& g,
                    const PhasePoint& m);

}  // namespace slowfast
