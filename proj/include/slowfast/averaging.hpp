#pragma once

#include "slowfast/flow.hpp"
#include "slowfast/system.hpp"

// The global averaging operator <.> and the integrating operator S on
// functions, vector fields and 1-forms, realized as orbit quadratures with
// tangent-map pullbacks. S solves the homological equation L_Upsilon S(f) =
// f - <f> with zero average; it is evaluated spectrally (see fourier.hpp).

namespace slowfast {

/// A quadrature value together with the N-vs-N/2 refinement estimate.
struct QuadratureResult {
    double value = 0.0;
    double err_est = 0.0;
};

/// Scalar samples f(states[j]) along the orbit.
std::vector<double> sample_scalar(const SlowFastSystem& sys, const ScalarField& f,
                                  const OrbitSample& orbit);

double average_function(const SlowFastSystem& sys, const ScalarField& f, const OrbitSample& orbit);
QuadratureResult average_function_est(const SlowFastSystem& sys, const ScalarField& f,
                                      const OrbitSample& orbit);

double s_function(const SlowFastSystem& sys, const ScalarField& f, const OrbitSample& orbit);
QuadratureResult s_function_est(const SlowFastSystem& sys, const ScalarField& f,
                                const OrbitSample& orbit);
/// Plain weighted sum with the sawtooth weight; O(1/N), debug path only.
double s_function_direct(const SlowFastSystem& sys, const ScalarField& f, const OrbitSample& orbit);

/// Directional derivative of f along the generator at m. Uses the analytic
/// chain rule when f carries a gradient, otherwise a centered difference
/// along the flow with dt = budgets::flow_diff_dt.
double lie_derivative_upsilon(const SlowFastSystem& sys, const ScalarField& f, const PhasePoint& m,
                              const IntegratorConfig& cfg = {});

/// Pullback average of a vector field: (1/N) sum_j DFl^{t_j}(m)^{-1} X(states[j]).
TangentVector average_vector_field(const SlowFastSystem& sys, const VectorField& X,
                                   const OrbitSample& orbit);

/// Integrating operator on a vector field (componentwise spectral S of the
/// pulled-back integrand).
TangentVector s_vector_field(const SlowFastSystem& sys, const VectorField& X,
                             const OrbitSample& orbit);

/// Pullback average of a 1-form: (1/N) sum_j alpha(states[j]) . DFl^{t_j}(m).
Covector average_one_form(const SlowFastSystem& sys, const OneForm& alpha,
                          const OrbitSample& orbit);

/// Throws NumericsError when a quadrature estimate is too noisy to sit under
/// a finite-difference step of size fd_step.
void require_quadrature_budget(double err_est, double fd_step, double budget);

}  // namespace slowfast
