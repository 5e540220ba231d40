#pragma once

// Control-field rotation: switching time, grating wave vector, rephasing
// offsets and the no-cross-talk margin.

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

#include "cavmem/geometry.hpp"

namespace cavmem::control {

enum class ScanPhase { storage, retrieval_backward, retrieval_forward };

inline std::string to_string(ScanPhase p) {
    switch (p) {
    case ScanPhase::storage: return "storage";
    case ScanPhase::retrieval_backward: return "retrieval_backward";
    case ScanPhase::retrieval_forward: return "retrieval_forward";
    }
    return "?";
}

struct RotationSchedule {
    double theta0 = std::numbers::pi / 2;  ///< mean control direction vs. z (rad)
    double dtheta = 1.0;                   ///< total rotation angle (rad)
    double T = 1.0;                        ///< scan duration
    double lambda_c = 1.0;                 ///< control wavelength
    ScanPhase phase = ScanPhase::storage;

    [[nodiscard]] double k_c() const { return 2.0 * std::numbers::pi / lambda_c; }
    [[nodiscard]] double angular_rate() const { return dtheta / T; }

    void validate() const {
        if (!(theta0 > 0.0 && theta0 < std::numbers::pi))
            throw std::invalid_argument("RotationSchedule: theta0 must lie in (0, pi)");
        if (!(dtheta > 0.0)) throw std::invalid_argument("RotationSchedule: dtheta must be positive");
        if (!(T > 0.0)) throw std::invalid_argument("RotationSchedule: T must be positive");
        if (!(lambda_c > 0.0)) throw std::invalid_argument("RotationSchedule: lambda_c must be positive");
    }

    [[nodiscard]] RotationSchedule with_phase(ScanPhase p) const {
        RotationSchedule s = *this;
        s.phase = p;
        return s;
    }

    /// Schedule whose switching time equals `delta` for a sample of length
    /// Lz; the rotation angle is solved from the other parameters.
    static RotationSchedule for_switching_time(double theta0, double T, double delta, double Lz,
                                               double lambda_c) {
        RotationSchedule s;
        s.theta0 = theta0;
        s.T = T;
        s.lambda_c = lambda_c;
        s.dtheta = T * lambda_c / (delta * Lz * std::sin(theta0));
        return s;
    }
};

/// δ = (T/Δθ)·λ_c/(Lz sinθ0): time to advance the grating by one
/// longitudinal spin mode.
inline double switching_time(const RotationSchedule& s, double Lz) {
    const double st = std::sin(s.theta0);
    if (!(s.theta0 > 0.0 && s.theta0 < std::numbers::pi) || std::abs(st) < 1e-300)
        throw std::invalid_argument("switching_time: theta0 = 0 or pi has no longitudinal grating component");
    if (!(Lz > 0.0)) throw std::invalid_argument("switching_time: Lz must be positive");
    return (s.T / s.dtheta) * s.lambda_c / (Lz * st);
}

/// Time argument of q(t) for the schedule's phase. Storage runs on [-T, 0]
/// with q = 0 at t = 0; backward retrieval re-scans in reverse on [0, T];
/// forward retrieval jumps back to the initial angle and repeats the scan.
inline double mapped_time(const RotationSchedule& s, double t) {
    switch (s.phase) {
    case ScanPhase::storage: return t;
    case ScanPhase::retrieval_backward: return -t;
    case ScanPhase::retrieval_forward: return t - s.T;
    }
    return t;
}

/// Transverse grating component q_x(t) = k_c cosθ0 (Δθ/T) t_eff.
inline double q_transverse(double t, const RotationSchedule& s) {
    return s.k_c() * std::cos(s.theta0) * s.angular_rate() * mapped_time(s, t);
}

/// Longitudinal grating component q_z(t) = k_c sinθ0 (Δθ/T) t_eff.
/// The sense of rotation is fixed so that the grating moves toward spin
/// modes of increasing p as t_eff decreases, i.e. mode p is phase matched at
/// t_eff = -t_p.
inline double q_longitudinal(double t, const RotationSchedule& s) {
    return s.k_c() * std::sin(s.theta0) * s.angular_rate() * mapped_time(s, t);
}

struct RephasingOffsets {
    double t_p = 0.0;     ///< longitudinal offset p δ Lz / L
    double t_gouy = 0.0;  ///< Gouy-phase offset between transverse orders
};

inline RephasingOffsets rephasing_offsets(int p, ModeIndex field, ModeIndex spin, double delta,
                                          const BeamGeometry& geom) {
    RephasingOffsets r;
    r.t_p = p * delta * geom.Lz / geom.L;
    const int dorder = (spin.m - field.m) + (spin.n - field.n);
    r.t_gouy = dorder * delta * geom.Lz / (2.0 * std::numbers::pi * geom.rayleigh_range());
    return r;
}

/// ρ = |tanθ0| / [(π w0/Lz)(T/δ)√(m_max+1)]; cross-talk is negligible for
/// ρ ≫ 1. Returns +∞ at θ0 = π/2.
inline double multimode_margin(double theta0, double w0, double Lz, double T, double delta, int m_max) {
    if (!(delta > 0.0)) throw std::invalid_argument("multimode_margin: delta must be positive");
    if (m_max < 0) throw std::invalid_argument("multimode_margin: m_max must be >= 0");
    const double c = std::cos(theta0);
    if (std::abs(c) < 1e-15) return std::numeric_limits<double>::infinity();
    const double denom = (std::numbers::pi * w0 / Lz) * (T / delta) * std::sqrt(m_max + 1.0);
    return std::abs(std::tan(theta0)) / denom;
}

/// Default threshold at which the margin counts as "≫ 1".
inline constexpr double kMarginSatisfied = 10.0;

/// Interval of θ0 (rad) around π/2 on which multimode_margin ≥ rho_min.
inline std::pair<double, double> multimode_angle_range(double pi_w0_over_Lz, double T_over_delta, int m_max,
                                                       double rho_min) {
    const double x = rho_min * pi_w0_over_Lz * T_over_delta * std::sqrt(m_max + 1.0);
    const double lo = std::atan(x);
    return {lo, std::numbers::pi - lo};
}

} // namespace cavmem::control
