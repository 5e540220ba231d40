#pragma once

// Closed-form results: echo formulas, the bad-cavity storage map, Raman
// rates, diffraction losses, mode/pulse capacity and the solid-state design
// calculator.

#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cavmem/control.hpp"
#include "cavmem/metrics.hpp"

namespace cavmem::analytic {

using cplx = std::complex<double>;

/// Γ = |g_R|² N δ / 2.
inline double collective_rate(double gR2N, double delta) {
    if (!(gR2N >= 0.0) || !(delta > 0.0)) throw std::invalid_argument("collective_rate: need g_R^2 N >= 0 and delta > 0");
    return 0.5 * gR2N * delta;
}

/// Echo amplitude factor 4κΓ/(κ+Γ)²: the product of the write and read
/// transfer amplitudes 2√(κΓ)/(κ+Γ). Equal to 1 only at κ = Γ.
inline double echo_amplitude_factor(double Gamma, double kappa) {
    if (!(kappa > 0.0) || !(Gamma >= 0.0)) throw std::invalid_argument("echo_amplitude_factor: need kappa > 0, Gamma >= 0");
    const double s = kappa + Gamma;
    return 4.0 * kappa * Gamma / (s * s);
}

namespace detail {
inline ModeSeries echo(const ModeSeries& in, double T, const std::function<cplx(std::size_t, double)>& f) {
    if (!(T > 0.0)) throw std::invalid_argument("echo: T must be positive");
    const auto n = static_cast<std::size_t>(std::llround(T / in.dt));
    ModeSeries out = ModeSeries::zeros(in.modes, 0.0, in.dt, n + 1);
    for (std::size_t m = 0; m < in.modes.size(); ++m)
        for (std::size_t k = 0; k <= n; ++k) out.values[m][k] = f(m, out.time(k));
    return out;
}
} // namespace detail

/// Time-reversed replica on [0, T]: −a·𝓔_in(−t)·e^{−2γ_R t}.
inline ModeSeries echo_backward(const ModeSeries& in, double Gamma, double kappa, double gammaR, double T) {
    const double a = echo_amplitude_factor(Gamma, kappa);
    return detail::echo(in, T, [&](std::size_t m, double t) {
        return -a * in.interpolate(m, -t) * std::exp(-2.0 * gammaR * t);
    });
}

/// Delayed replica on [0, T]: −a·𝓔_in(t − T)·e^{−γ_R T}.
inline ModeSeries echo_forward(const ModeSeries& in, double Gamma, double kappa, double gammaR, double T) {
    const double a = echo_amplitude_factor(Gamma, kappa) * std::exp(-gammaR * T);
    return detail::echo(in, T, [&](std::size_t m, double t) { return -a * in.interpolate(m, t - T); });
}

struct StoredSpin {
    std::map<int, cplx> S;  ///< p → S_mnp(0)
    bool valid = true;      ///< κ+Γ ≥ 5 × input bandwidth
};

struct StorageMapInput {
    std::function<cplx(double)> E_in;  ///< input envelope of this mode
    double Gamma = 0.0;
    double kappa = 1.0;
    double detuning = 0.0;  ///< δ_mn
    double gammaR = 0.0;
    double delta = 1.0;
    double coupling_phase = 0.0;  ///< arg(g_R√N)
    double bandwidth = 0.0;       ///< spectral width of E_in, for the validity flag
    double Lz_over_L = 1.0;
    int p_min = 0;
    int p_max = 0;
};

/// Bad-cavity storage map S_p(0) = i(g_R√N)* √(2κ) δ/(κ+Γ) 𝓔_in(τ_p) e^{(−iδ_mn+γ_R)τ_p}
/// with τ_p = −t_p the time at which spin mode p is phase matched.
inline StoredSpin stored_spin_analytic(const StorageMapInput& in) {
    if (!(in.kappa > 0.0) || !(in.delta > 0.0)) throw std::invalid_argument("stored_spin_analytic: need kappa, delta > 0");
    if (in.p_max < in.p_min) throw std::invalid_argument("stored_spin_analytic: empty p range");
    StoredSpin r;
    r.valid = in.kappa + in.Gamma >= 5.0 * in.bandwidth;
    const cplx G = std::polar(std::sqrt(2.0 * in.Gamma / in.delta), in.coupling_phase);
    const cplx pre = cplx(0.0, 1.0) * std::conj(G) * std::sqrt(2.0 * in.kappa) * in.delta / (in.kappa + in.Gamma);
    for (int p = in.p_min; p <= in.p_max; ++p) {
        const double tau = -p * in.delta * in.Lz_over_L;
        r.S[p] = pre * in.E_in(tau) * std::exp(cplx(in.gammaR, -in.detuning) * tau);
    }
    return r;
}

/// γ_R = γ_S + γ_P |Ω|²/Δ².
inline double gammaR_effective(double gamma_S, double gamma_P, double Omega, double Delta) {
    if (Delta == 0.0) throw std::invalid_argument("gammaR_effective: Delta must be nonzero");
    return gamma_S + gamma_P * Omega * Omega / (Delta * Delta);
}

/// Round-trip diffraction loss α_m = 4√π (8^m/m!) (2πN_F)^{m+1/2} e^{−4πN_F},
/// evaluated in log space and clamped to [0, 1].
inline double diffraction_loss(int m, double N_F) {
    if (m < 0 || m > 200) throw std::invalid_argument("diffraction_loss: m must lie in [0, 200]");
    if (!(N_F > 0.0)) throw std::invalid_argument("diffraction_loss: N_F must be positive");
    const double x = 2.0 * std::numbers::pi * N_F;
    const double ln = std::log(4.0 * std::sqrt(std::numbers::pi)) - std::lgamma(m + 1.0) + m * std::log(8.0) +
                      (m + 0.5) * std::log(x) - 4.0 * std::numbers::pi * N_F;
    return ln >= 0.0 ? 1.0 : std::exp(ln);
}

/// α_mn = 1 − (1 − α_m)(1 − α_n), expanded so tiny losses do not cancel.
inline double diffraction_loss_pair(int m, int n, double N_F) {
    const double am = diffraction_loss(m, N_F), an = diffraction_loss(n, N_F);
    return am + an - am * an;
}

struct CapacityInput {
    double fresnel_number = 10.0;
    double mirror_transmittance = 1e-3;
    double loss_budget = 1e-4;  ///< α_max
    double w0_over_Lz = 0.02 / std::numbers::pi;
    double T_over_delta_per_pulse = 5.0;
    double margin = 10.0;  ///< ρ_min
    double lambda_c_over_Lz = 1.53e-6 / 2.5e-3;

    void validate() const {
        if (!(fresnel_number > 0.0)) throw std::invalid_argument("capacity: fresnel_number must be positive");
        if (!(mirror_transmittance > 0.0 && mirror_transmittance < 1.0))
            throw std::invalid_argument("capacity: mirror_transmittance must lie in (0, 1)");
        if (!(loss_budget > 0.0)) throw std::invalid_argument("capacity: loss_budget must be positive");
        if (!(w0_over_Lz > 0.0)) throw std::invalid_argument("capacity: w0_over_Lz must be positive");
        if (!(T_over_delta_per_pulse > 0.0)) throw std::invalid_argument("capacity: T_over_delta_per_pulse must be positive");
        if (!(margin > 0.0)) throw std::invalid_argument("capacity: margin must be positive");
        if (!(lambda_c_over_Lz > 0.0)) throw std::invalid_argument("capacity: lambda_c_over_Lz must be positive");
    }
};

struct CapacityReport {
    int max_index = -1;            ///< largest m with α_m ≤ α_max
    int n_transverse = 0;          ///< pairs (m, n) with α_mn ≤ α_max
    int n_transverse_square = 0;   ///< (max_index + 1)²
    double theta_min_deg = 0.0;
    double theta_max_deg = 0.0;
    double scan_per_pulse = 0.0;   ///< rotation per pulse at θ0 = π/2 (rad)
    int n_pulses = 0;
    double n_pulses_exact = 0.0;
    std::string note;
};

/// Transverse-mode count from the loss budget, admissible θ0 band from the
/// no-cross-talk margin, and the number of pulses that fit in that band when
/// each pulse consumes a rotation (T/δ)λ_c/(Lz sinθ0).
inline CapacityReport capacity_estimate(const CapacityInput& in) {
    in.validate();
    CapacityReport r;
    for (int m = 0; m <= 200; ++m) {
        if (diffraction_loss(m, in.fresnel_number) > in.loss_budget) break;
        r.max_index = m;
    }
    if (r.max_index < 0) {
        r.note = "no transverse mode meets the loss budget";
        return r;
    }
    for (int m = 0; m <= r.max_index; ++m)
        for (int n = 0; n <= r.max_index; ++n)
            if (diffraction_loss_pair(m, n, in.fresnel_number) <= in.loss_budget) ++r.n_transverse;
    r.n_transverse_square = (r.max_index + 1) * (r.max_index + 1);

    const auto [lo, hi] = control::multimode_angle_range(std::numbers::pi * in.w0_over_Lz, in.T_over_delta_per_pulse,
                                                         r.max_index, in.margin);
    r.theta_min_deg = lo * 180.0 / std::numbers::pi;
    r.theta_max_deg = hi * 180.0 / std::numbers::pi;
    r.scan_per_pulse = in.T_over_delta_per_pulse * in.lambda_c_over_Lz;
    // ∫ dθ / [scan_per_pulse / sinθ] over the admissible band
    r.n_pulses_exact = (std::cos(lo) - std::cos(hi)) / r.scan_per_pulse;
    r.n_pulses = static_cast<int>(std::floor(r.n_pulses_exact));
    r.note = "n_transverse counts pairs with alpha_mn <= alpha_max; n_transverse_square = (max_index+1)^2";
    return r;
}

namespace phys {
inline constexpr double hbar = 1.054571817e-34;
inline constexpr double e = 1.602176634e-19;
inline constexpr double m_e = 9.1093837015e-31;
inline constexpr double eps0 = 8.8541878128e-12;
inline constexpr double c = 299792458.0;
} // namespace phys

/// Physical-unit parameter bundle (SI).
struct DesignPoint {
    double oscillator_strength = 2e-7;
    double ion_density = 7e23;        ///< m⁻³
    double lambda = 1.53e-6;          ///< m
    double Delta = 2.0 * std::numbers::pi * 1e8;  ///< rad/s
    double Omega_over_Delta_sq = 2e-5;
    double kappa = 1e8;               ///< s⁻¹
    double delta = 2e-7;              ///< s
    double Lz = 2.5e-3;               ///< m
    double L = 2.5e-3;                ///< m
    double beam_diameter = 2.5e-3;    ///< m, 1/e² intensity diameter
    double gamma_S = 0.0;
    double gamma_P = 0.0;
    double refractive_index = 1.0;    ///< local-field factor taken as 1
    std::optional<double> g2N;        ///< use instead of the value derived from f

    void validate() const {
        auto pos = [](double v, const char* name) {
            if (!(v > 0.0)) throw std::invalid_argument(std::string("design: ") + name + " must be positive");
        };
        pos(oscillator_strength, "oscillator_strength");
        pos(ion_density, "ion_density");
        pos(lambda, "lambda");
        pos(Delta, "Delta");
        pos(Omega_over_Delta_sq, "Omega_over_Delta_sq");
        pos(kappa, "kappa");
        pos(delta, "delta");
        pos(Lz, "Lz");
        pos(L, "L");
        pos(beam_diameter, "beam_diameter");
        pos(refractive_index, "refractive_index");
        if (!(gamma_S >= 0.0) || !(gamma_P >= 0.0)) throw std::invalid_argument("design: decay rates must be >= 0");
        if (g2N && !(*g2N > 0.0)) throw std::invalid_argument("design: g2N must be positive");
    }
};

struct DesignReport {
    double omega = 0.0;           ///< optical angular frequency (rad/s)
    double dipole = 0.0;          ///< C·m, from f = 2 m_e ω d²/(3ħe²)
    double g2N_from_f = 0.0;      ///< s⁻², = d² ω n/(2ħε₀)
    double g2N = 0.0;             ///< s⁻², value used downstream
    double gR2N = 0.0;            ///< g²N (Ω/Δ)²
    double Gamma = 0.0;           ///< s⁻¹
    double impedance_ratio = 0.0; ///< Γ/κ
    double Omega = 0.0;           ///< rad/s
    double Omega_over_2pi = 0.0;  ///< Hz
    double E0 = 0.0;              ///< V/m, ħΩ/d
    double intensity = 0.0;       ///< W/m², 2nε₀cE₀²
    double intensity_W_cm2 = 0.0;
    double power = 0.0;           ///< W, I·πD²/8 for a Gaussian of 1/e² diameter D
    double transmittance_traveling = 0.0;  ///< 2κL/c
    double transmittance_standing = 0.0;   ///< 4κL/c
    double gammaR = 0.0;
    double kappa_delta = 0.0;
    bool raman_valid = true;      ///< (Ω/Δ)² ≤ 10⁻²
    bool bad_cavity_valid = true; ///< κδ ≥ 1
};

inline DesignReport design_point(const DesignPoint& dp) {
    dp.validate();
    using namespace phys;
    DesignReport r;
    r.omega = 2.0 * std::numbers::pi * c / dp.lambda;
    r.dipole = std::sqrt(3.0 * hbar * e * e * dp.oscillator_strength / (2.0 * m_e * r.omega));
    r.g2N_from_f = r.dipole * r.dipole * r.omega * dp.ion_density / (2.0 * hbar * eps0 * dp.refractive_index * dp.refractive_index);
    r.g2N = dp.g2N.value_or(r.g2N_from_f);
    r.gR2N = r.g2N * dp.Omega_over_Delta_sq;
    r.Gamma = collective_rate(r.gR2N, dp.delta);
    r.impedance_ratio = r.Gamma / dp.kappa;
    r.Omega = dp.Delta * std::sqrt(dp.Omega_over_Delta_sq);
    r.Omega_over_2pi = r.Omega / (2.0 * std::numbers::pi);
    r.E0 = hbar * r.Omega / r.dipole;
    r.intensity = 2.0 * dp.refractive_index * eps0 * c * r.E0 * r.E0;
    r.intensity_W_cm2 = r.intensity * 1e-4;
    r.power = r.intensity * std::numbers::pi * dp.beam_diameter * dp.beam_diameter / 8.0;
    r.transmittance_traveling = 2.0 * dp.kappa * dp.L / c;
    r.transmittance_standing = 4.0 * dp.kappa * dp.L / c;
    r.gammaR = gammaR_effective(dp.gamma_S, dp.gamma_P, r.Omega, dp.Delta);
    r.kappa_delta = dp.kappa * dp.delta;
    r.raman_valid = dp.Omega_over_Delta_sq <= 1e-2;
    r.bad_cavity_valid = r.kappa_delta >= 1.0;
    return r;
}

} // namespace cavmem::analytic
