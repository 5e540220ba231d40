#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cavmem {

/// Raised when a quadrature rule cannot certify its own accuracy.
class QuadratureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised by the integrators on non-finite state or similar breakdowns.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace quad {

struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Gauss-Hermite rule for weight e^{-x^2} on the real line.
///
/// Newton iteration on the orthonormal Hermite recurrence, seeded with the
/// usual asymptotic root estimates; nodes are returned in ascending order.
inline Rule gauss_hermite(int n) {
    if (n < 1) throw std::invalid_argument("gauss_hermite: n must be >= 1");
    Rule r;
    r.nodes.assign(static_cast<std::size_t>(n), 0.0);
    r.weights.assign(static_cast<std::size_t>(n), 0.0);
    const double pim4 = std::pow(std::numbers::pi, -0.25);
    const int half = (n + 1) / 2;
    double z = 0.0;
    for (int i = 0; i < half; ++i) {
        if (i == 0)
            z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
        else if (i == 1)
            z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
        else if (i == 2)
            z = 1.86 * z - 0.86 * r.nodes[0];
        else if (i == 3)
            z = 1.91 * z - 0.91 * r.nodes[1];
        else
            z = 2.0 * z - r.nodes[static_cast<std::size_t>(i - 2)];

        double pp = 0.0;
        bool converged = false;
        for (int it = 0; it < 100; ++it) {
            double p1 = pim4, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z))) {
                converged = true;
                break;
            }
        }
        if (!converged) throw QuadratureError("gauss_hermite: Newton iteration did not converge");
        // stored descending first, reversed below
        r.nodes[static_cast<std::size_t>(i)] = z;
        r.nodes[static_cast<std::size_t>(n - 1 - i)] = -z;
        r.weights[static_cast<std::size_t>(i)] = 2.0 / (pp * pp);
        r.weights[static_cast<std::size_t>(n - 1 - i)] = 2.0 / (pp * pp);
    }
    if (n % 2 == 1) r.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
    std::vector<double> xs(r.nodes.rbegin(), r.nodes.rend());
    std::vector<double> ws(r.weights.rbegin(), r.weights.rend());
    r.nodes = std::move(xs);
    r.weights = std::move(ws);
    return r;
}

/// Gauss-Legendre rule on [-1, 1].
inline Rule gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
    Rule r;
    r.nodes.assign(static_cast<std::size_t>(n), 0.0);
    r.weights.assign(static_cast<std::size_t>(n), 0.0);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1);
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) <= 1e-16) break;
        }
        r.nodes[static_cast<std::size_t>(i)] = -z;
        r.nodes[static_cast<std::size_t>(n - 1 - i)] = z;
        const double w = 2.0 / ((1.0 - z * z) * pp * pp);
        r.weights[static_cast<std::size_t>(i)] = w;
        r.weights[static_cast<std::size_t>(n - 1 - i)] = w;
    }
    return r;
}

/// Values of the orthonormal Hermite polynomials h_0..h_kmax at x, where
/// ∫ e^{-x²} h_j h_k dx = δ_jk. Three-term recurrence; no factorials, so
/// orders into the hundreds stay finite.
inline void hermite_orthonormal(double x, int kmax, std::span<double> out) {
    const double pim4 = std::pow(std::numbers::pi, -0.25);
    out[0] = pim4;
    if (kmax == 0) return;
    out[1] = std::sqrt(2.0) * x * pim4;
    for (int k = 1; k < kmax; ++k) {
        out[static_cast<std::size_t>(k + 1)] =
            std::sqrt(2.0 / (k + 1)) * x * out[static_cast<std::size_t>(k)] -
            std::sqrt(static_cast<double>(k) / (k + 1)) * out[static_cast<std::size_t>(k - 1)];
    }
}

/// Composite trapezoid rule on a uniform grid with spacing h.
template <typename T>
T trapezoid(std::span<const T> f, double h) {
    if (f.size() < 2) return T{};
    T s = 0.5 * (f.front() + f.back());
    for (std::size_t i = 1; i + 1 < f.size(); ++i) s += f[i];
    return s * h;
}

} // namespace quad
} // namespace cavmem
