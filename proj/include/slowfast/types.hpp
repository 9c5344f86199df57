#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "slowfast/errors.hpp"

namespace slowfast {

/// A point (y, x, p, q) of the phase space R^{2r} x R^{2k}. The flat layout
/// used throughout the library is [y(0..r) x(0..r) p(0..k) q(0..k)].
struct PhasePoint {
    Eigen::VectorXd y, x, p, q;

    PhasePoint() = default;
    PhasePoint(Eigen::VectorXd y_, Eigen::VectorXd x_, Eigen::VectorXd p_, Eigen::VectorXd q_)
        : y(std::move(y_)), x(std::move(x_)), p(std::move(p_)), q(std::move(q_)) {}

    /// Convenience constructor for r = k = 1.
    PhasePoint(double y1, double x1, double p1, double q1);

    static PhasePoint zero(int r, int k);

    int r() const { return static_cast<int>(y.size()); }
    int k() const { return static_cast<int>(p.size()); }
    int dim() const { return 2 * r() + 2 * k(); }

    Eigen::VectorXd flat() const;
    static PhasePoint from_flat(int r, int k, const Eigen::VectorXd& v);

    bool all_finite() const;
};

double distance(const PhasePoint& a, const PhasePoint& b);

/// Components of a tangent vector at a phase point, same block layout.
struct TangentVector {
    Eigen::VectorXd dy, dx, dp, dq;

    TangentVector() = default;
    TangentVector(Eigen::VectorXd dy_, Eigen::VectorXd dx_, Eigen::VectorXd dp_, Eigen::VectorXd dq_)
        : dy(std::move(dy_)), dx(std::move(dx_)), dp(std::move(dp_)), dq(std::move(dq_)) {}

    static TangentVector zero(int r, int k);

    Eigen::VectorXd flat() const;
    static TangentVector from_flat(int r, int k, const Eigen::VectorXd& v);

    double norm() const { return flat().norm(); }
    bool all_finite() const;

    TangentVector operator+(const TangentVector& o) const;
    TangentVector operator-(const TangentVector& o) const;
    TangentVector operator*(double s) const;
};

/// Components of a 1-form at a phase point.
struct Covector {
    Eigen::VectorXd cy, cx, cp, cq;

    Covector() = default;
    Covector(Eigen::VectorXd cy_, Eigen::VectorXd cx_, Eigen::VectorXd cp_, Eigen::VectorXd cq_)
        : cy(std::move(cy_)), cx(std::move(cx_)), cp(std::move(cp_)), cq(std::move(cq_)) {}

    static Covector zero(int r, int k);

    Eigen::VectorXd flat() const;
    static Covector from_flat(int r, int k, const Eigen::VectorXd& v);

    /// Natural pairing <alpha, v>.
    double pair(const TangentVector& v) const { return flat().dot(v.flat()); }
    bool all_finite() const;
};

/// An antisymmetric (2r+2k)x(2r+2k) matrix in the flat block coordinates.
/// Stored exactly antisymmetrized: W <- (W - W^T)/2 on construction.
class Bivector {
  public:
    Bivector() = default;
    explicit Bivector(const Eigen::MatrixXd& w) : w_((w - w.transpose()) / 2.0) {}

    const Eigen::MatrixXd& matrix() const { return w_; }

    /// Interior product with a 1-form: (i_alpha W)^b = alpha_a W^{ab}.
    TangentVector interior(int r, int k, const Covector& alpha) const {
        Eigen::VectorXd v = w_.transpose() * alpha.flat();
        return TangentVector::from_flat(r, k, v);
    }

  private:
    Eigen::MatrixXd w_;
};

}  // namespace slowfast
