#pragma once

#include <utility>
#include <vector>

#include "slowfast/averaging.hpp"
#include "slowfast/flow.hpp"
#include "slowfast/system.hpp"

// Momentum map of the circle action, the connection 1-form Theta, the
// horizontal lifts of the slow coordinate fields, the lifted slow Poisson
// bivector, and the correction terms K, <K>, g built from them.

namespace slowfast {

/// Connection quantities assembled at a single phase point.
struct ConnectionData {
    double J = 0.0;
    Eigen::VectorXd theta_p, theta_q;          // k components each
    std::vector<TangentVector> hor_p, hor_q;   // k lifts each
    TangentVector V;
    double K = 0.0;
    double K_avg = 0.0;
    double g = 0.0;
};

/// Per-node tables shared by the connection-level quadratures: Hamiltonian
/// gradients, frequencies, and the integrating operator applied to the slow
/// momentum-map derivatives, resolved at every orbit node.
struct OrbitTables {
    std::vector<Covector> grads;
    std::vector<double> omegas;
    std::vector<std::vector<double>> theta_p;  // [i][node]
    std::vector<std::vector<double>> theta_q;
};

OrbitTables build_orbit_tables(const SlowFastSystem& sys, const OrbitSample& orbit);

/// J(m) as the loop integral (1/2pi) ∮ y . dx along the orbit (the pullback
/// integrand collapses because the generator is invariant under its own flow).
double momentum_map(const SlowFastSystem& sys, const OrbitSample& orbit);
double momentum_map(const SlowFastSystem& sys, const PhasePoint& m, const OrbitConfig& cfg = {});

/// (dJ/dp^i, dJ/dq^i) from the single-orbit relation
/// dJ/dp^i = (H_p^i - <H_p^i>) / omega (never differenced across orbits).
std::pair<double, double> dJ_slow(const SlowFastSystem& sys, const PhasePoint& m, int i,
                                  const OrbitConfig& cfg = {});

/// Connection 1-form components (Theta_i^p, Theta_i^q) = (S(dJ/dp^i), S(dJ/dq^i)).
std::pair<double, double> theta(const SlowFastSystem& sys, const PhasePoint& m, int i,
                                const OrbitConfig& cfg = {});

/// Horizontal lifts hor_i^p = d/dp^i + X0_{Theta_i^p} and the q-counterpart.
/// The fast-Hamiltonian part differentiates Theta in the fast variables by a
/// nested 4th-order stencil; each stencil point is an orbit quadrature.
std::pair<TangentVector, TangentVector> horizontal_lift(const SlowFastSystem& sys,
                                                        const PhasePoint& m, int i,
                                                        const OrbitConfig& cfg = {});

/// Lifted slow Poisson bivector sum_i hor_i^p ^ hor_i^q.
Bivector pi_theta(const SlowFastSystem& sys, const PhasePoint& m, const OrbitConfig& cfg = {});

/// V = 1/2 sum_i (Theta_i^p d/dq^i - Theta_i^q d/dp^i) and its orbit average.
TangentVector v_field(const SlowFastSystem& sys, const PhasePoint& m, const OrbitConfig& cfg = {});
TangentVector v_avg(const SlowFastSystem& sys, const PhasePoint& m, const OrbitConfig& cfg = {});

/// K = 1/2 sum_i (Theta_i^p H_q^i - Theta_i^q H_p^i) and its orbit average.
double correction_K(const SlowFastSystem& sys, const PhasePoint& m, const OrbitConfig& cfg = {});
double averaged_K(const SlowFastSystem& sys, const PhasePoint& m, const OrbitConfig& cfg = {});
QuadratureResult averaged_K_est(const SlowFastSystem& sys, const PhasePoint& m,
                                const OrbitConfig& cfg = {});

/// g = -(1/2 omega) sum_i (Theta_i^p domega/dq^i - Theta_i^q domega/dp^i).
double g_factor(const SlowFastSystem& sys, const PhasePoint& m, const OrbitConfig& cfg = {});

ConnectionData connection_data(const SlowFastSystem& sys, const PhasePoint& m,
                               const OrbitConfig& cfg = {});

}  // namespace slowfast
