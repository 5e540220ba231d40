#pragma once

// Hermite-Gaussian cavity modes and their overlaps with the rotating
// control-field phase grating.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "cavmem/control.hpp"
#include "cavmem/geometry.hpp"
#include "cavmem/quadrature.hpp"

namespace cavmem::modes {

using cplx = std::complex<double>;

/// Node count per transverse axis; the convergence check doubles it.
inline constexpr int kDefaultNodes = 64;
inline constexpr double kQuadratureTolerance = 1e-6;

/// sin(x)/x with sinc(0) = 1. Callers carry the π explicitly.
inline double sinc(double x) {
    if (std::abs(x) < 1e-4) {
        const double x2 = x * x;
        return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
    }
    return std::sin(x) / x;
}

namespace detail {
inline const quad::Rule& hermite_rule(int n) {
    if (n == kDefaultNodes) {
        static const quad::Rule r = quad::gauss_hermite(kDefaultNodes);
        return r;
    }
    if (n == 2 * kDefaultNodes) {
        static const quad::Rule r = quad::gauss_hermite(2 * kDefaultNodes);
        return r;
    }
    if (n == kDefaultNodes / 2) {
        static const quad::Rule r = quad::gauss_hermite(kDefaultNodes / 2);
        return r;
    }
    throw std::invalid_argument("hermite_rule: unsupported node count");
}

inline const quad::Rule& legendre_rule(int n) {
    if (n == 129) {
        static const quad::Rule r = quad::gauss_legendre(129);
        return r;
    }
    if (n == 65) {
        static const quad::Rule r = quad::gauss_legendre(65);
        return r;
    }
    throw std::invalid_argument("legendre_rule: unsupported node count");
}
} // namespace detail

/// u_mn(r) including envelope, wavefront curvature and Gouy phase,
/// normalized so (1/A)∬|u_mn|² dx dy = 1 in every plane z.
inline cplx eval_mode(ModeIndex idx, double x, double y, double z, const BeamGeometry& geom) {
    if (idx.m < 0 || idx.n < 0) throw std::invalid_argument("eval_mode: negative mode index");
    const double a = std::sqrt(2.0) / geom.spot_size(z);
    const int kmax = std::max(idx.m, idx.n);
    std::vector<double> hx(static_cast<std::size_t>(kmax + 1)), hy(static_cast<std::size_t>(kmax + 1));
    quad::hermite_orthonormal(a * x, kmax, hx);
    quad::hermite_orthonormal(a * y, kmax, hy);
    const double r2 = x * x + y * y;
    const double envelope = a * std::sqrt(geom.A) * hx[static_cast<std::size_t>(idx.m)] *
                            hy[static_cast<std::size_t>(idx.n)] * std::exp(-0.5 * a * a * r2);
    const double R = geom.curvature_radius(z);
    const double curvature = std::isinf(R) ? 0.0 : -geom.wavenumber() * r2 / (2.0 * R);
    const double gouy = (idx.m + idx.n + 1) * geom.gouy(z);
    return envelope * std::polar(1.0, curvature + gouy);
}

/// Hermite values at the Gauss-Hermite nodes, reusable across q_x.
/// Immutable after construction.
class OverlapTable {
public:
    OverlapTable(int max_order, double w0, int nodes = kDefaultNodes)
        : max_order_(max_order), w0_(w0), rule_(&detail::hermite_rule(nodes)) {
        if (max_order < 0) throw std::invalid_argument("OverlapTable: negative order");
        const std::size_t nn = rule_->nodes.size();
        h_.assign(nn * static_cast<std::size_t>(max_order + 1), 0.0);
        for (std::size_t k = 0; k < nn; ++k)
            quad::hermite_orthonormal(rule_->nodes[k], max_order,
                                      std::span<double>(h_.data() + k * (max_order + 1), max_order + 1));
    }

    [[nodiscard]] int max_order() const { return max_order_; }

    /// ∫ e^{iq x} ψ_j(ax) ψ_k(ax) a dx with a = √2/w0.
    [[nodiscard]] cplx axis(double q, int j, int k) const {
        check(j);
        check(k);
        const double scale = q * w0_ / std::sqrt(2.0);
        const std::size_t stride = static_cast<std::size_t>(max_order_ + 1);
        cplx s = 0.0;
        for (std::size_t i = 0; i < rule_->nodes.size(); ++i) {
            const double v = rule_->weights[i] * h_[i * stride + static_cast<std::size_t>(j)] *
                             h_[i * stride + static_cast<std::size_t>(k)];
            if (scale == 0.0)
                s += v;
            else
                s += v * std::polar(1.0, scale * rule_->nodes[i]);
        }
        return s;
    }

    /// (1/A)∬ e^{i q_x x} u*_a u_b dx dy at the waist plane.
    [[nodiscard]] cplx overlap(double q_x, ModeIndex a, ModeIndex b) const {
        return axis(q_x, a.m, b.m) * axis(0.0, a.n, b.n);
    }

private:
    void check(int k) const {
        if (k < 0 || k > max_order_) throw std::out_of_range("OverlapTable: order outside table");
    }

    int max_order_;
    double w0_;
    const quad::Rule* rule_;
    std::vector<double> h_;
};

/// Transverse grating overlap (1/A)∬ e^{i q_x x} u*_a u_b dx dy at z = 0,
/// by 64-node Gauss-Hermite quadrature per axis over the infinite plane.
/// Throws QuadratureError when the 128-node result differs by more than 1e-6.
inline cplx transverse_overlap(double q_x, ModeIndex a, ModeIndex b, const BeamGeometry& geom) {
    const int order = std::max({a.m, a.n, b.m, b.n});
    const OverlapTable coarse(order, geom.w0, kDefaultNodes);
    const OverlapTable fine(order, geom.w0, 2 * kDefaultNodes);
    const cplx v = coarse.overlap(q_x, a, b);
    const cplx check = fine.overlap(q_x, a, b);
    if (std::abs(v - check) > kQuadratureTolerance)
        throw QuadratureError("transverse_overlap: node-doubling difference " +
                              std::to_string(std::abs(v - check)) + " exceeds tolerance");
    return v;
}

/// First-order ladder coefficients: α₊ = (q_x w0/2)√(m+1), α₋ = (q_x w0/2)√m.
inline double alpha_pm(double q_x, double w0, int m, int sign) {
    if (m < 0) throw std::invalid_argument("alpha_pm: m must be >= 0");
    if (sign != 1 && sign != -1) throw std::invalid_argument("alpha_pm: sign must be +1 or -1");
    return 0.5 * q_x * w0 * std::sqrt(static_cast<double>(sign > 0 ? m + 1 : m));
}

/// Longitudinal factor sinc[(t_eff + t_p + t_gouy)π/δ] of the coupling kernel.
inline double longitudinal_factor(double t_eff, ModeIndex field, SpinIndex spin, double delta,
                                  const BeamGeometry& geom) {
    const auto off = control::rephasing_offsets(spin.p, field, spin.mode, delta, geom);
    return sinc((t_eff + off.t_p + off.t_gouy) * std::numbers::pi / delta);
}

/// Coupling B_{mn,m'n'p}(t) in the thin-sample approximation: longitudinal
/// sinc times the waist-plane transverse overlap.
inline cplx coupling_B_factorized(double t, ModeIndex field, SpinIndex spin, const control::RotationSchedule& sched,
                                  const BeamGeometry& geom) {
    const double delta = control::switching_time(sched, geom.Lz);
    const double t_eff = control::mapped_time(sched, t);
    return longitudinal_factor(t_eff, field, spin, delta, geom) *
           transverse_overlap(control::q_transverse(t, sched), field, spin.mode, geom);
}

struct NumericGrid {
    int nx = 64;
    int ny = 64;
    int nz = 129;
};

namespace detail {
inline cplx coupling_B_grid(double t, ModeIndex field, SpinIndex spin, const control::RotationSchedule& sched,
                            const BeamGeometry& geom, int nxy, int nz) {
    const auto& gh = hermite_rule(nxy);
    const auto& gl = legendre_rule(nz);
    const double qx = control::q_transverse(t, sched);
    const double qz = control::q_longitudinal(t, sched);
    const double qp = 2.0 * std::numbers::pi * spin.p / geom.L;
    const double half = 0.5 * geom.Lz;

    cplx total = 0.0;
    for (std::size_t k = 0; k < gl.nodes.size(); ++k) {
        const double z = half * gl.nodes[k];
        const double w = geom.spot_size(z);
        const double scale = w / std::sqrt(2.0);
        cplx plane = 0.0;
        for (std::size_t i = 0; i < gh.nodes.size(); ++i) {
            const double x = scale * gh.nodes[i];
            const double wx = gh.weights[i] * std::exp(gh.nodes[i] * gh.nodes[i]);
            const cplx phase_x = std::polar(1.0, qx * x);
            for (std::size_t j = 0; j < gh.nodes.size(); ++j) {
                const double y = scale * gh.nodes[j];
                const double wy = gh.weights[j] * std::exp(gh.nodes[j] * gh.nodes[j]);
                const cplx prod = std::conj(eval_mode(field, x, y, z, geom)) * eval_mode(spin.mode, x, y, z, geom);
                plane += wx * wy * phase_x * prod;
            }
        }
        plane *= scale * scale / geom.A;
        total += gl.weights[k] * plane * std::polar(1.0, (qz + qp) * z);
    }
    // (1/Lz)∫dz over [-Lz/2, Lz/2] = ½ Σ w_k f(z_k)
    return 0.5 * total;
}
} // namespace detail

/// Direct 3D quadrature of (1/V_a)∫ e^{iφ(r,t)} u*_mn(r) u_{m'n'p}(r) d³r over
/// the sample slab, using the full z-dependent mode functions. Transverse
/// axes use Gauss-Hermite nodes scaled to w(z); z uses Gauss-Legendre.
/// A half-resolution pass (32×32×65) must agree within 1e-6.
inline cplx coupling_B_numeric(double t, ModeIndex field, SpinIndex spin, const control::RotationSchedule& sched,
                               const BeamGeometry& geom, NumericGrid grid = {}) {
    if (grid.nx != grid.ny) throw std::invalid_argument("coupling_B_numeric: nx must equal ny");
    const cplx v = detail::coupling_B_grid(t, field, spin, sched, geom, grid.nx, grid.nz);
    const cplx check = detail::coupling_B_grid(t, field, spin, sched, geom, grid.nx / 2, (grid.nz + 1) / 2);
    if (std::abs(v - check) > kQuadratureTolerance)
        throw QuadratureError("coupling_B_numeric: grid-halving difference " + std::to_string(std::abs(v - check)) +
                              " exceeds tolerance");
    return v;
}

} // namespace cavmem::modes
