#pragma once

#include <utility>
#include <vector>

#include "slowfast/system.hpp"

// Integration of the reparametrized fast flow. The generator is
// Upsilon = X0 / omega, whose flow is exactly 2pi-periodic; orbits sampled at
// uniform parameter values are the substrate of every averaging quadrature.

namespace slowfast {

struct IntegratorConfig {
    /// Fixed-step RK4 substeps between consecutive orbit nodes. Nodes stay
    /// exactly uniform; substeps only refine the integration in between.
    int substeps_per_node = 16;
    double closure_tol = 1e-9;
    /// Ignore the closed-form orbit of quadratic systems and integrate
    /// numerically (cross-check path).
    bool force_numeric = false;
    /// Adaptive embedded-pair tolerances for long-horizon drift runs.
    double rtol = 1e-10;
    double atol = 1e-12;
    /// Search window for period detection.
    double period_max_time = 1e3;
};

struct OrbitConfig {
    int nodes = 256;
    IntegratorConfig integrator{};
    /// Ceiling on (quadrature error estimate / FD step) at nested-difference
    /// call sites; violations raise NumericsError rather than degrade.
    double noise_budget = 1e-6;
};

/// A discretized orbit of the circle action through `base`: states and
/// accumulated tangent maps at t_j = 2pi j / N, plus the 2pi-closure defect.
struct OrbitSample {
    PhasePoint base;
    int n_nodes = 0;
    std::vector<PhasePoint> states;
    std::vector<Eigen::MatrixXd> tangent_maps;
    double closure_error = 0.0;
    double omega_base = 0.0;

    double time(int j) const;
};

/// Upsilon(m) = X0(m) / omega(m).
TangentVector eval_upsilon(const SlowFastSystem& sys, const PhasePoint& m,
                           const IntegratorConfig& cfg = {});

/// omega(m), falling back to 2pi / find_period when no analytic frequency
/// function is attached to the system.
double frequency(const SlowFastSystem& sys, const PhasePoint& m, const IntegratorConfig& cfg = {});

/// Time-t flow of Upsilon. Checks the domain guard along the way and, when
/// |t| == 2pi, the closure defect against cfg.closure_tol.
PhasePoint flow_upsilon(const SlowFastSystem& sys, const PhasePoint& m, double t,
                        const IntegratorConfig& cfg = {});

/// Flow together with its linearization D Fl^t (variational equations
/// co-integrated with the state).
std::pair<PhasePoint, Eigen::MatrixXd> tangent_flow_upsilon(const SlowFastSystem& sys,
                                                            const PhasePoint& m, double t,
                                                            const IntegratorConfig& cfg = {});

/// Builds an N-node orbit through m and validates closure and tangent maps.
/// N must be even and at least 8 (powers of two give the cleanest spectra).
OrbitSample sample_orbit(const SlowFastSystem& sys, const PhasePoint& m, int n_nodes,
                         const IntegratorConfig& cfg = {});

OrbitSample sample_orbit(const SlowFastSystem& sys, const PhasePoint& m, const OrbitConfig& cfg);

/// Minimal period of the fast flow through m by first-return detection,
/// refined by bisection. Cross-checks against the analytic frequency when one
/// is present (relative error 1e-6) and throws NumericsError on mismatch.
double find_period(const SlowFastSystem& sys, const PhasePoint& m, const IntegratorConfig& cfg = {});

}  // namespace slowfast
