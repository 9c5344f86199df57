#include "slowfast/sl2.hpp"

#include <cmath>

#include "slowfast/errors.hpp"
#include "slowfast/system.hpp"

namespace slowfast {

Mat2 sympl_unit() {
    Mat2 j;
    j << 0, -1, 1, 0;
    return j;
}

double q_form(const Mat2& m, const Vec2& z) { return -0.5 * (sympl_unit() * m * z).dot(z); }

Vec2 q_form_grad(const Mat2& m, const Vec2& z) {
    Mat2 jm = sympl_unit() * m;
    return -0.5 * (jm + jm.transpose()) * z;
}

Vec2 sl2_exact_flow(const Mat2& a, double t, const Vec2& z) {
    return (std::cos(t) * Mat2::Identity() + std::sin(t) * a) * z;
}

namespace {

// the calculus stays inside sl(2); remove the float-level trace residue
Mat2 project_tracefree(Mat2 m) {
    const double d = 0.5 * (m(0, 0) - m(1, 1));
    m(0, 0) = d;
    m(1, 1) = -d;
    return m;
}

}  // namespace

Mat2 avg_Q(const Mat2& a, const Mat2& b) { return project_tracefree(0.5 * (b - a * b * a)); }

Mat2 s_Q(const Mat2& a, const Mat2& b) { return project_tracefree(0.25 * (a * b - b * a)); }

double avg_QQ(const Mat2& a, const Mat2& b, const Mat2& c, const Vec2& z) {
    const Mat2 aba = a * b * a, aca = a * c * a;
    const double t1 = 0.25 * q_form(b - aba, z) * q_form(c - aca, z);
    const double t2 = 0.125 * q_form(b + aba, z) * q_form(c + aca, z);
    const double t3 = 0.125 * q_form(b * a - a * b, z) * q_form(c * a - a * c, z);
    return t1 + t2 + t3;
}

void validate_sl2(const Mat2& a) {
    if (!a.allFinite()) throw NumericsError("sl2 field: non-finite matrix");
    if (std::abs(a.trace()) > 1e-14) throw NumericsError("sl2 field: nonzero trace");
    if (std::abs(a.determinant() - 1.0) > 1e-12) throw NumericsError("sl2 field: det != 1");
    if (((a * a) + Mat2::Identity()).norm() > 1e-12) throw NumericsError("sl2 field: A^2 != -I");
    // orientation: Q_A positive on z != 0 together with omega > 0
    if (a(1, 0) <= 0) throw NumericsError("sl2 field: Q_A not positive (lower-left entry <= 0)");
}

Mat2 QuadraticSystem::A_at(const PhasePoint& m) const {
    Mat2 a = field.A(m.p, m.q);
    validate_sl2(a);
    return a;
}

Mat2 QuadraticSystem::dA_dp_at(const PhasePoint& m, int i) const { return field.dA_dp.at(i)(m.p, m.q); }

Mat2 QuadraticSystem::dA_dq_at(const PhasePoint& m, int i) const { return field.dA_dq.at(i)(m.p, m.q); }

std::pair<double, double> closed_theta(const QuadraticSystem& qs, const PhasePoint& m, int i) {
    const Mat2 a = qs.A_at(m);
    const Vec2 z = QuadraticSystem::fast(m);
    return {0.5 * q_form(a * qs.dA_dp_at(m, i), z), 0.5 * q_form(a * qs.dA_dq_at(m, i), z)};
}

double closed_K_avg(const QuadraticSystem& qs, const PhasePoint& m) {
    const Mat2 a = qs.A_at(m);
    const Vec2 z = QuadraticSystem::fast(m);
    double sum = 0.0;
    for (int i = 0; i < qs.k; ++i) {
        const Mat2 ap = qs.dA_dp_at(m, i), aq = qs.dA_dq_at(m, i);
        sum += q_form(a * ap, z) * q_form(aq, z) - q_form(a * aq, z) * q_form(ap, z);
    }
    return 0.25 * qs.omega_at(m) * sum;
}

double closed_g(const QuadraticSystem& qs, const PhasePoint& m) {
    const Mat2 a = qs.A_at(m);
    const Vec2 z = QuadraticSystem::fast(m);
    const Eigen::VectorXd wp = qs.domega_dp(m.p, m.q), wq = qs.domega_dq(m.p, m.q);
    double sum = 0.0;
    for (int i = 0; i < qs.k; ++i) {
        sum += 0.5 * q_form(a * qs.dA_dp_at(m, i), z) * wq(i) -
               0.5 * q_form(a * qs.dA_dq_at(m, i), z) * wp(i);
    }
    return -sum / (2.0 * qs.omega_at(m));
}

double closed_F(const QuadraticSystem& qs, double eps, const PhasePoint& m) {
    const Mat2 a = qs.A_at(m);
    const Vec2 z = QuadraticSystem::fast(m);
    const Eigen::VectorXd hp = qs.dh_dp(m.p, m.q), hq = qs.dh_dq(m.p, m.q);
    const Eigen::VectorXd wp = qs.domega_dp(m.p, m.q), wq = qs.domega_dq(m.p, m.q);
    Mat2 b = Mat2::Zero(), c = Mat2::Zero();  // entrywise slow brackets {h,A}_1, {omega,A}_1
    for (int i = 0; i < qs.k; ++i) {
        const Mat2 ap = qs.dA_dp_at(m, i), aq = qs.dA_dq_at(m, i);
        b += hp(i) * aq - hq(i) * ap;
        c += wp(i) * aq - wq(i) * ap;
    }
    const Mat2 ab = a * b - b * a, ac = a * c - c * a;
    const double qa = q_form(a, z);
    return qa - eps / (4.0 * qs.omega_at(m)) * (q_form(ab, z) + qa * q_form(ac, z));
}

SlowFastSystem to_system(std::shared_ptr<const QuadraticSystem> qs) {
    if (!qs) throw std::invalid_argument("to_system: null quadratic system");
    SlowFastSystem sys;
    sys.r = 1;
    sys.k = qs->k;

    auto q = qs;
    sys.H = [q](const PhasePoint& m) {
        return q->h(m.p, m.q) + q->omega_at(m) * q_form(q->A_at(m), QuadraticSystem::fast(m));
    };
    sys.gradH = [q](const PhasePoint& m) {
        const Mat2 a = q->A_at(m);
        const Vec2 z = QuadraticSystem::fast(m);
        const double w = q->omega_at(m);
        const Vec2 gz = w * q_form_grad(a, z);
        const double qa = q_form(a, z);
        const Eigen::VectorXd hp = q->dh_dp(m.p, m.q), hq = q->dh_dq(m.p, m.q);
        const Eigen::VectorXd wp = q->domega_dp(m.p, m.q), wq = q->domega_dq(m.p, m.q);
        Eigen::VectorXd cp(q->k), cq(q->k);
        for (int i = 0; i < q->k; ++i) {
            cp(i) = hp(i) + wp(i) * qa + w * q_form(q->dA_dp_at(m, i), z);
            cq(i) = hq(i) + wq(i) * qa + w * q_form(q->dA_dq_at(m, i), z);
        }
        return Covector{Eigen::VectorXd::Constant(1, gz(0)), Eigen::VectorXd::Constant(1, gz(1)),
                        cp, cq};
    };
    sys.omega = [q](const PhasePoint& m) { return q->omega_at(m); };
    sys.grad_omega = [q](const PhasePoint& m) {
        return Covector{Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1), q->domega_dp(m.p, m.q),
                        q->domega_dq(m.p, m.q)};
    };
    // generator Upsilon = (A z, 0); Jacobian is analytic
    sys.jac_upsilon = [q](const PhasePoint& m) {
        const int n = 2 + 2 * q->k;
        const Mat2 a = q->A_at(m);
        const Vec2 z = QuadraticSystem::fast(m);
        Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
        jac.topLeftCorner(2, 2) = a;
        for (int i = 0; i < q->k; ++i) {
            jac.block(0, 2 + i, 2, 1) = q->dA_dp_at(m, i) * z;
            jac.block(0, 2 + q->k + i, 2, 1) = q->dA_dq_at(m, i) * z;
        }
        return jac;
    };
    sys.quadratic = q;
    return sys;
}

}  // namespace slowfast
