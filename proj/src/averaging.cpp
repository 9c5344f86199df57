#include "slowfast/averaging.hpp"

#include <cmath>

#include "slowfast/budgets.hpp"
#include "slowfast/errors.hpp"
#include "slowfast/fourier.hpp"

namespace slowfast {

namespace {

// pulled-back samples of a vector field along the orbit, one flat vector per node
std::vector<Eigen::VectorXd> pullback_samples(const VectorField& X, const OrbitSample& orbit) {
    if (orbit.tangent_maps.size() != orbit.states.size())
        throw SingularTangentError("orbit sample has no tangent maps");
    std::vector<Eigen::VectorXd> out;
    out.reserve(orbit.states.size());
    for (size_t j = 0; j < orbit.states.size(); ++j) {
        const Eigen::MatrixXd& m = orbit.tangent_maps[j];
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
        const double det = lu.determinant();
        if (!std::isfinite(det) || std::abs(det) < 1e-10)
            throw SingularTangentError("tangent map is numerically singular");
        Eigen::VectorXd v = lu.solve(X.value(orbit.states[j]).flat());
        if (!v.allFinite()) throw SingularTangentError("non-finite pullback");
        out.push_back(std::move(v));
    }
    return out;
}

}  // namespace

std::vector<double> sample_scalar(const SlowFastSystem&, const ScalarField& f,
                                  const OrbitSample& orbit) {
    std::vector<double> v;
    v.reserve(orbit.states.size());
    for (const auto& s : orbit.states) {
        const double val = f.value(s);
        if (!std::isfinite(val)) throw NumericsError("non-finite integrand sample");
        v.push_back(val);
    }
    return v;
}

double average_function(const SlowFastSystem& sys, const ScalarField& f, const OrbitSample& orbit) {
    return fourier::mean(sample_scalar(sys, f, orbit));
}

QuadratureResult average_function_est(const SlowFastSystem& sys, const ScalarField& f,
                                      const OrbitSample& orbit) {
    const auto samples = sample_scalar(sys, f, orbit);
    const double full = fourier::mean(samples);
    const double half = fourier::mean(fourier::half_grid(samples));
    return {full, std::abs(full - half)};
}

double s_function(const SlowFastSystem& sys, const ScalarField& f, const OrbitSample& orbit) {
    return fourier::s_at_base(sample_scalar(sys, f, orbit));
}

QuadratureResult s_function_est(const SlowFastSystem& sys, const ScalarField& f,
                                const OrbitSample& orbit) {
    const auto samples = sample_scalar(sys, f, orbit);
    const double full = fourier::s_at_base(samples);
    const double half = fourier::s_at_base(fourier::half_grid(samples));
    return {full, std::abs(full - half)};
}

double s_function_direct(const SlowFastSystem& sys, const ScalarField& f, const OrbitSample& orbit) {
    return fourier::s_direct(sample_scalar(sys, f, orbit));
}

double lie_derivative_upsilon(const SlowFastSystem& sys, const ScalarField& f, const PhasePoint& m,
                              const IntegratorConfig& cfg) {
    if (f.grad) {
        const TangentVector u = eval_upsilon(sys, m, cfg);
        const double d = f.grad(m).pair(u);
        if (!std::isfinite(d)) throw NumericsError("non-finite Lie derivative");
        return d;
    }
    const double dt = budgets::flow_diff_dt;
    const double fp = f.value(flow_upsilon(sys, m, dt, cfg));
    const double fm = f.value(flow_upsilon(sys, m, -dt, cfg));
    const double d = (fp - fm) / (2.0 * dt);
    if (!std::isfinite(d)) throw NumericsError("non-finite Lie derivative");
    return d;
}

TangentVector average_vector_field(const SlowFastSystem&, const VectorField& X,
                                   const OrbitSample& orbit) {
    const auto pulled = pullback_samples(X, orbit);
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(orbit.base.dim());
    for (const auto& v : pulled) acc += v;
    acc /= static_cast<double>(pulled.size());
    return TangentVector::from_flat(orbit.base.r(), orbit.base.k(), acc);
}

TangentVector s_vector_field(const SlowFastSystem&, const VectorField& X,
                             const OrbitSample& orbit) {
    const auto pulled = pullback_samples(X, orbit);
    const int n = orbit.base.dim();
    const int nn = static_cast<int>(pulled.size());
    Eigen::VectorXd out(n);
    std::vector<double> comp(nn);
    for (int c = 0; c < n; ++c) {
        for (int j = 0; j < nn; ++j) comp[j] = pulled[j](c);
        out(c) = fourier::s_at_base(comp);
    }
    return TangentVector::from_flat(orbit.base.r(), orbit.base.k(), out);
}

Covector average_one_form(const SlowFastSystem&, const OneForm& alpha,
                          const OrbitSample& orbit) {
    if (orbit.tangent_maps.size() != orbit.states.size())
        throw SingularTangentError("orbit sample has no tangent maps");
    Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(orbit.base.dim());
    for (size_t j = 0; j < orbit.states.size(); ++j) {
        acc += alpha.value(orbit.states[j]).flat().transpose() * orbit.tangent_maps[j];
    }
    acc /= static_cast<double>(orbit.states.size());
    if (!acc.allFinite()) throw NumericsError("non-finite 1-form average");
    return Covector::from_flat(orbit.base.r(), orbit.base.k(), acc.transpose());
}

void require_quadrature_budget(double err_est, double fd_step, double budget) {
    if (!(err_est <= budget * fd_step))
        throw NumericsError("quadrature noise " + std::to_string(err_est) +
                            " too large for finite-difference step " + std::to_string(fd_step));
}

}  // namespace slowfast
