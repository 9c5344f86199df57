#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

// Small spectral kernel for uniform periodic samples f_j = f(2pi j / N).
// The integrating operator is evaluated on the Fourier side: with
// f = sum_n c_n e^{int}, the zero-average solution u of du/dt = f - <f>
// along the orbit is u = sum_{n != 0} c_n e^{int} / (in), which at the grid
// points reads u_j = sum_{n=1}^{N/2-1} (2/n) Im(c_n e^{i n t_j}). This is
// exact on trigonometric polynomials and spectrally accurate on smooth data,
// unlike the direct weighted sum whose sawtooth weight limits it to O(1/N).

namespace slowfast::fourier {

inline double mean(std::span<const double> f) {
    double s = 0.0;
    for (double v : f) s += v;
    return s / static_cast<double>(f.size());
}

/// Fourier coefficients c_n for n = 1 .. N/2-1 (c_0 excluded, Nyquist dropped).
inline std::vector<std::complex<double>> coefficients(std::span<const double> f) {
    const int n = static_cast<int>(f.size());
    const double w = 2.0 * std::numbers::pi / n;
    std::vector<std::complex<double>> c(n / 2);
    for (int m = 1; m < n / 2; ++m) {
        double re = 0.0, im = 0.0;
        for (int j = 0; j < n; ++j) {
            const double a = w * m * j;
            re += f[j] * std::cos(a);
            im -= f[j] * std::sin(a);
        }
        c[m] = {re / n, im / n};
    }
    return c;
}

/// Integrating-operator value at the base node (j = 0).
inline double s_at_base(std::span<const double> f) {
    const auto c = coefficients(f);
    double s = 0.0;
    for (int m = 1; m < static_cast<int>(c.size()); ++m) s += 2.0 * c[m].imag() / m;
    return s;
}

/// Integrating-operator values at every node.
inline std::vector<double> s_at_nodes(std::span<const double> f) {
    const int n = static_cast<int>(f.size());
    const auto c = coefficients(f);
    const double w = 2.0 * std::numbers::pi / n;
    std::vector<double> u(n, 0.0);
    for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int m = 1; m < static_cast<int>(c.size()); ++m) {
            const double a = w * m * j;
            // Im(c_m e^{i m t_j})
            s += 2.0 * (c[m].imag() * std::cos(a) + c[m].real() * std::sin(a)) / m;
        }
        u[j] = s;
    }
    return u;
}

/// Direct weighted sum (1/N) sum_j (t_j - pi) f_j; O(1/N) accurate, kept as a
/// debug path.
inline double s_direct(std::span<const double> f) {
    const int n = static_cast<int>(f.size());
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += (2.0 * std::numbers::pi * j / n - std::numbers::pi) * f[j];
    return s / n;
}

/// Stride-2 subsample (a valid uniform grid over the same period).
inline std::vector<double> half_grid(std::span<const double> f) {
    std::vector<double> g;
    g.reserve(f.size() / 2);
    for (size_t j = 0; j < f.size(); j += 2) g.push_back(f[j]);
    return g;
}

}  // namespace slowfast::fourier
