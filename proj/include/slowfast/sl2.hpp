#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <vector>

#include "slowfast/types.hpp"

// Closed-form calculus for the quadratic case r = 1: Hamiltonians of the form
// H = h(p,q) + omega(p,q) * Q_A with A(p,q) a trace-free 2x2 matrix field of
// unit determinant. Everything in this header is exact matrix algebra and is
// used as the analytic oracle against the quadrature pipeline.

namespace slowfast {

using Mat2 = Eigen::Matrix2d;
using Vec2 = Eigen::Vector2d;

/// The symplectic unit [[0,-1],[1,0]].
Mat2 sympl_unit();

/// Q_M(z) = -1/2 (J M z) . z for a 2x2 matrix M and fast pair z = (y, x).
double q_form(const Mat2& m, const Vec2& z);

/// Fast gradient of Q_M: d/dz Q_M(z) = -1/2 (JM + (JM)^T) z.
Vec2 q_form_grad(const Mat2& m, const Vec2& z);

/// (cos t I + sin t A) z — the exact period-2pi fast flow generated by A.
Vec2 sl2_exact_flow(const Mat2& a, double t, const Vec2& z);

/// Matrix of the orbit average of Q_B: <Q_B> = Q of (B - A B A)/2.
Mat2 avg_Q(const Mat2& a, const Mat2& b);

/// Matrix of the integrating operator applied to Q_B: S(Q_B) = Q of [A,B]/4.
Mat2 s_Q(const Mat2& a, const Mat2& b);

/// Orbit average of the product Q_B * Q_C evaluated at z (three-term form).
double avg_QQ(const Mat2& a, const Mat2& b, const Mat2& c, const Vec2& z);

/// A slow-variable-dependent sl(2,R) field with analytic entrywise partials.
struct SL2Field {
    int k = 1;
    std::function<Mat2(const Eigen::VectorXd& p, const Eigen::VectorXd& q)> A;
    std::vector<std::function<Mat2(const Eigen::VectorXd&, const Eigen::VectorXd&)>> dA_dp;
    std::vector<std::function<Mat2(const Eigen::VectorXd&, const Eigen::VectorXd&)>> dA_dq;
};

/// Quadratic-case system data: H = h + omega Q_A with analytic slow gradients.
struct QuadraticSystem {
    int k = 1;
    SL2Field field;
    std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&)> h;
    std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&)> omega;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&)> dh_dp, dh_dq;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&)> domega_dp, domega_dq;

    /// Evaluates A at the slow coordinates of m, checking the sl(2) invariants
    /// (zero trace, unit determinant, A^2 = -I, positive orientation).
    Mat2 A_at(const PhasePoint& m) const;

    Mat2 dA_dp_at(const PhasePoint& m, int i) const;
    Mat2 dA_dq_at(const PhasePoint& m, int i) const;

    double omega_at(const PhasePoint& m) const { return omega(m.p, m.q); }
    static Vec2 fast(const PhasePoint& m) { return Vec2(m.y(0), m.x(0)); }
};

/// Validates the field invariants at one slow point; throws NumericsError.
void validate_sl2(const Mat2& a);

/// Theta components at m: (1/2 Q_{A dA/dp^i}, 1/2 Q_{A dA/dq^i}).
std::pair<double, double> closed_theta(const QuadraticSystem& qs, const PhasePoint& m, int i);

/// Closed form of the averaged correction <K>.
double closed_K_avg(const QuadraticSystem& qs, const PhasePoint& m);

/// Closed form of the reparametrization factor g.
double closed_g(const QuadraticSystem& qs, const PhasePoint& m);

/// Closed form of the improved invariant F = Q_A - eps/(4 omega) (Q_[A,B] + Q_A Q_[A,C])
/// with B = {h, A}_1 and C = {omega, A}_1 taken entry by entry.
double closed_F(const QuadraticSystem& qs, double eps, const PhasePoint& m);

struct SlowFastSystem;

/// Wraps the quadratic data as a general slow-fast system with analytic
/// gradients and the exact-orbit fast path attached.
SlowFastSystem to_system(std::shared_ptr<const QuadraticSystem> qs);

}  // namespace slowfast
