#pragma once

#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "slowfast/connection.hpp"

// First-order normal-form splitting of the averaged perturbation field into a
// connection-horizontal part, a vertical fast-Hamiltonian part and a
// reparametrization along the fast field, plus the improved invariant F and
// long-horizon drift studies.

namespace slowfast {

struct NormalFormSplit {
    TangentVector P_hor, P_ver, X1_avg;
    double g = 0.0;
    double residual = 0.0;
};

/// Horizontal part: contraction of the full differential dH with the lifted
/// slow Poisson bivector.
TangentVector p_hor(const SlowFastSystem& sys, const PhasePoint& m, const OrbitConfig& cfg = {});

/// Vertical part: fast-Hamiltonian field of the averaged correction <K>.
TangentVector p_ver(const SlowFastSystem& sys, const PhasePoint& m, const OrbitConfig& cfg = {});

/// Master consistency check: || <X1> - P_hor - P_ver - g X0 || at m, with
/// both sides computed through independent numerical routes.
double main1_residual(const SlowFastSystem& sys, const PhasePoint& m, const OrbitConfig& cfg = {});

NormalFormSplit normal_form_split(const SlowFastSystem& sys, const PhasePoint& m,
                                  const OrbitConfig& cfg = {});

/// |L_{<X1>} J| at m by a directional stencil on the momentum-map field.
/// `renorm` optionally adds a slow-variable function to J (the negative test:
/// renormalizing J breaks the first-integral property).
double adi_check(const SlowFastSystem& sys, const PhasePoint& m, const OrbitConfig& cfg = {},
                 const ScalarField* renorm = nullptr);

/// Improved invariant F = J - (eps/omega) S({H, J}_1).
double approx_integral_F(const SlowFastSystem& sys, double eps, const PhasePoint& m,
                         const OrbitConfig& cfg = {});

/// J and F from a single orbit quadrature.
std::pair<double, double> invariants_JF(const SlowFastSystem& sys, double eps, const PhasePoint& m,
                                        const OrbitConfig& cfg = {});

struct DriftReport {
    double eps = 0.0;
    double horizon = 0.0;
    std::string quantity;
    double max_drift = 0.0;
    std::vector<std::pair<double, double>> samples;  // (t, value)
    double slope_fit = std::numeric_limits<double>::quiet_NaN();
};

struct DriftRunResult {
    DriftReport J, F, H;
    bool truncated = false;
    double exit_time = 0.0;
};

/// Integrates the full flow with an adaptive embedded pair over
/// horizon_c / eps (horizon_c when eps == 0) and samples H, J, F at
/// n_samples output times. Domain exits truncate the run and set the flag.
DriftRunResult drift_run(const SlowFastSystem& sys, double eps, const PhasePoint& m0,
                         double horizon_c, const OrbitConfig& cfg = {}, int n_samples = 256);

}  // namespace slowfast
