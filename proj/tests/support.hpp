#pragma once

// Shared fixtures and brute-force oracles for the test suite.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include "cavmem/dynamics.hpp"
#include "cavmem/hg_modes.hpp"
#include "cavmem/metrics.hpp"
#include "cavmem/protocol.hpp"

namespace testing_support {

using cavmem::cplx;
using cavmem::ModeIndex;
namespace dyn = cavmem::dynamics;
namespace proto = cavmem::protocol;

/// Single mode, θ0 = π/2, L = Lz, T = 30δ, impedance matched.
inline dyn::SystemConfig single_mode(double kappa = 4.2, double gammaR = 0.0, double shift = 0.0, double T = 30.0) {
    return dyn::SystemConfig::dimensionless({{0, 0}}, {kappa}, {shift}, kappa, gammaR, T, std::numbers::pi / 2,
                                            dyn::ModelKind::simplified);
}

inline proto::PulseSpec pulse(double fwhm, double center = -15.0, ModeIndex mode = {0, 0}) {
    proto::PulseSpec p;
    p.amplitudes = {{mode, cplx{1.0, 0.0}}};
    p.fwhm = fwhm;
    p.center = center;
    return p;
}

/// Slice of a [-T, T] series restricted to t ≥ 0.
inline cavmem::ModeSeries retrieval_part(const cavmem::ModeSeries& s) {
    const std::size_t n = (s.size() - 1) / 2;
    auto r = cavmem::ModeSeries::zeros(s.modes, 0.0, s.dt, n + 1);
    for (std::size_t m = 0; m < s.values.size(); ++m)
        for (std::size_t k = 0; k <= n; ++k) r.values[m][k] = s.values[m][n + k];
    return r;
}

inline double rel_l2(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += std::norm(a[i] - b[i]);
        den += std::norm(b[i]);
    }
    return std::sqrt(num / den);
}

/// Dense 2D trapezoid of (1/A)∬ e^{iqx} u*_a u_b over [−R, R]² at z = 0.
inline cplx dense_overlap(double q, ModeIndex a, ModeIndex b, const cavmem::BeamGeometry& g, int n = 801,
                          double R_over_w0 = 8.0) {
    const double R = R_over_w0 * g.w0;
    const double h = 2.0 * R / (n - 1);
    cplx s = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = -R + i * h;
        const double wx = (i == 0 || i == n - 1) ? 0.5 : 1.0;
        for (int j = 0; j < n; ++j) {
            const double y = -R + j * h;
            const double wy = (j == 0 || j == n - 1) ? 0.5 : 1.0;
            s += wx * wy * std::polar(1.0, q * x) * std::conj(cavmem::modes::eval_mode(a, x, y, 0.0, g)) *
                 cavmem::modes::eval_mode(b, x, y, 0.0, g);
        }
    }
    return s * h * h / g.A;
}

/// Closed form of the 1D grating integral ∫ e^{iqx} ψ_j ψ_k for j,k ≤ 2
/// (Gaussian moments), with s = q w0/2.
inline cplx axis_closed_form(double qw0, int j, int k) {
    const double s = 0.5 * qw0;
    const cplx I(0.0, 1.0);
    const double g = std::exp(-0.5 * s * s);
    if (j > k) std::swap(j, k);
    if (j == 0 && k == 0) return g;
    if (j == 0 && k == 1) return I * s * g;
    if (j == 1 && k == 1) return (1.0 - s * s) * g;
    if (j == 0 && k == 2) return -s * s / std::sqrt(2.0) * g;
    if (j == 1 && k == 2) return I * s * (std::sqrt(2.0) - s * s / std::sqrt(2.0)) * g;
    if (j == 2 && k == 2) return (1.0 - 2.0 * s * s + 0.5 * s * s * s * s) * g;
    return 0.0;
}

} // namespace testing_support
