#pragma once

// Central tolerance and step-size budget. Every residual-type test asserts
// against these constants; nothing is tuned per call site. The invariants:
// quadrature error estimates must sit below noise_budget * (FD step) wherever
// a quadrature output is finite-differenced, and every orbit must close to
// closure_tol before it is used.

namespace slowfast::budgets {

// orbit construction
inline constexpr double closure_tol = 1e-9;

// quadrature-level identities (N = 256 nodes)
inline constexpr double quad_identity_tol = 1e-7;
inline constexpr double avg_zero_tol = 1e-7;

// connection-level checks (one nested finite-difference layer)
inline constexpr double hor_invariant_tol = 1e-6;

// normal-form master residual (quadrature + nested FD stack)
inline constexpr double main1_tol = 1e-5;
inline constexpr double adi_tol = 1e-6;

// nested finite differences
inline constexpr double fd_step_fast = 1e-4;  // fast-variable stencils
inline constexpr double fd_step_dir = 1e-4;   // directional derivatives
inline constexpr double fd_step_grad = 1e-5;  // gradient fallback base step
inline constexpr double flow_diff_dt = 1e-5;  // along-flow differences

// ceiling on (quadrature error / FD step) at nested-FD call sites
inline constexpr double noise_budget = 1e-6;

// closed-form vs quadrature agreement
inline constexpr double oracle_q1_tol = 1e-10;
inline constexpr double oracle_q2_tol = 1e-10;
inline constexpr double oracle_q3_tol = 1e-9;
inline constexpr double oracle_cross_tol = 1e-7;

// drift studies
inline constexpr double energy_drift_tol = 1e-8;
inline constexpr double slope_band = 0.3;

}  // namespace slowfast::budgets
