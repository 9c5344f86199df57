#include "slowfast/types.hpp"

namespace slowfast {

namespace {

Eigen::VectorXd cat4(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                     const Eigen::VectorXd& d) {
    Eigen::VectorXd v(a.size() + b.size() + c.size() + d.size());
    v << a, b, c, d;
    return v;
}

bool finite(const Eigen::VectorXd& v) { return v.allFinite(); }

}  // namespace

PhasePoint::PhasePoint(double y1, double x1, double p1, double q1) {
    y = Eigen::VectorXd::Constant(1, y1);
    x = Eigen::VectorXd::Constant(1, x1);
    p = Eigen::VectorXd::Constant(1, p1);
    q = Eigen::VectorXd::Constant(1, q1);
}

PhasePoint PhasePoint::zero(int r, int k) {
    return {Eigen::VectorXd::Zero(r), Eigen::VectorXd::Zero(r), Eigen::VectorXd::Zero(k),
            Eigen::VectorXd::Zero(k)};
}

Eigen::VectorXd PhasePoint::flat() const { return cat4(y, x, p, q); }

PhasePoint PhasePoint::from_flat(int r, int k, const Eigen::VectorXd& v) {
    if (v.size() != 2 * r + 2 * k) throw std::invalid_argument("from_flat: size mismatch");
    return {v.segment(0, r), v.segment(r, r), v.segment(2 * r, k), v.segment(2 * r + k, k)};
}

bool PhasePoint::all_finite() const { return finite(y) && finite(x) && finite(p) && finite(q); }

double distance(const PhasePoint& a, const PhasePoint& b) { return (a.flat() - b.flat()).norm(); }

TangentVector TangentVector::zero(int r, int k) {
    return {Eigen::VectorXd::Zero(r), Eigen::VectorXd::Zero(r), Eigen::VectorXd::Zero(k),
            Eigen::VectorXd::Zero(k)};
}

Eigen::VectorXd TangentVector::flat() const { return cat4(dy, dx, dp, dq); }

TangentVector TangentVector::from_flat(int r, int k, const Eigen::VectorXd& v) {
    if (v.size() != 2 * r + 2 * k) throw std::invalid_argument("from_flat: size mismatch");
    return {v.segment(0, r), v.segment(r, r), v.segment(2 * r, k), v.segment(2 * r + k, k)};
}

bool TangentVector::all_finite() const { return finite(dy) && finite(dx) && finite(dp) && finite(dq); }

TangentVector TangentVector::operator+(const TangentVector& o) const {
    return {dy + o.dy, dx + o.dx, dp + o.dp, dq + o.dq};
}

TangentVector TangentVector::operator-(const TangentVector& o) const {
    return {dy - o.dy, dx - o.dx, dp - o.dp, dq - o.dq};
}

TangentVector TangentVector::operator*(double s) const { return {dy * s, dx * s, dp * s, dq * s}; }

Covector Covector::zero(int r, int k) {
    return {Eigen::VectorXd::Zero(r), Eigen::VectorXd::Zero(r), Eigen::VectorXd::Zero(k),
            Eigen::VectorXd::Zero(k)};
}

Eigen::VectorXd Covector::flat() const { return cat4(cy, cx, cp, cq); }

Covector Covector::from_flat(int r, int k, const Eigen::VectorXd& v) {
    if (v.size() != 2 * r + 2 * k) throw std::invalid_argument("from_flat: size mismatch");
    return {v.segment(0, r), v.segment(r, r), v.segment(2 * r, k), v.segment(2 * r + k, k)};
}

bool Covector::all_finite() const { return finite(cy) && finite(cx) && finite(cp) && finite(cq); }

}  // namespace slowfast
