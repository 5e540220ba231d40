#pragma once

// Coupled cavity-mode / spin-wave equations and their fixed-step
// integration. Fields and coherences are complex envelopes.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cavmem/control.hpp"
#include "cavmem/geometry.hpp"
#include "cavmem/hg_modes.hpp"
#include "cavmem/quadrature.hpp"

namespace cavmem::dynamics {

using cplx = std::complex<double>;

enum class ModelKind { simplified, full };

inline std::string to_string(ModelKind k) { return k == ModelKind::simplified ? "simplified" : "full"; }

struct SystemConfig {
    std::vector<ModeIndex> modes;
    int p_min = 0;
    int p_max = 0;
    std::vector<double> kappa;        ///< κ_mn, aligned with `modes`
    std::vector<double> delta_shift;  ///< δ_mn (rad/time), aligned with `modes`
    double Gamma = 0.0;               ///< collective rate Γ
    double gammaR = 0.0;              ///< Raman coherence decay
    double delta = 1.0;               ///< switching time
    BeamGeometry geom;
    control::RotationSchedule sched;
    ModelKind model = ModelKind::simplified;

    [[nodiscard]] std::size_t n_modes() const { return modes.size(); }
    [[nodiscard]] std::size_t n_p() const { return static_cast<std::size_t>(p_max - p_min + 1); }

    /// g_R√N from 2Γ = |g_R|² N δ.
    [[nodiscard]] double coupling() const { return std::sqrt(2.0 * Gamma / delta); }

    [[nodiscard]] std::size_t index_of(ModeIndex m) const {
        const auto it = std::find(modes.begin(), modes.end(), m);
        if (it == modes.end()) throw std::out_of_range("SystemConfig: mode " + m.label() + " not configured");
        return static_cast<std::size_t>(it - modes.begin());
    }

    [[nodiscard]] double kappa_of(ModeIndex m) const { return kappa[index_of(m)]; }

    void validate() const {
        if (modes.empty()) throw std::invalid_argument("SystemConfig: no modes");
        for (std::size_t i = 0; i < modes.size(); ++i) {
            if (modes[i].m < 0 || modes[i].n < 0) throw std::invalid_argument("SystemConfig: negative mode index");
            for (std::size_t j = i + 1; j < modes.size(); ++j)
                if (modes[i] == modes[j]) throw std::invalid_argument("SystemConfig: duplicate mode");
        }
        if (kappa.size() != modes.size() || delta_shift.size() != modes.size())
            throw std::invalid_argument("SystemConfig: kappa/delta_shift must match modes");
        for (double k : kappa)
            if (!(k > 0.0)) throw std::invalid_argument("SystemConfig: kappa must be positive");
        if (!(Gamma >= 0.0)) throw std::invalid_argument("SystemConfig: Gamma must be >= 0");
        if (!(gammaR >= 0.0)) throw std::invalid_argument("SystemConfig: gammaR must be >= 0");
        if (!(delta > 0.0)) throw std::invalid_argument("SystemConfig: delta must be positive");
        if (p_max < p_min) throw std::invalid_argument("SystemConfig: empty p range");
        geom.validate();
        sched.validate();
        const double d = control::switching_time(sched, geom.Lz);
        if (std::abs(d - delta) > 1e-9 * delta)
            throw std::invalid_argument("SystemConfig: delta inconsistent with rotation schedule");
    }

    /// Configuration in units of the switching time (δ = 1, Lz = 1). The p
    /// range covers the scan plus `p_pad` sinc lobes on each side.
    static SystemConfig dimensionless(std::vector<ModeIndex> modes, std::vector<double> kappa_delta,
                                      std::vector<double> shift_delta, double Gamma_delta, double gammaR_delta,
                                      double T_over_delta, double theta0, ModelKind model,
                                      double w0_over_Lz = 0.02 / std::numbers::pi, double Lz_over_zR = 0.2,
                                      double L_over_Lz = 1.0, int p_pad = 8) {
        SystemConfig c;
        c.modes = std::move(modes);
        c.kappa = std::move(kappa_delta);
        c.delta_shift = std::move(shift_delta);
        c.Gamma = Gamma_delta;
        c.gammaR = gammaR_delta;
        c.delta = 1.0;
        c.model = model;
        c.geom = BeamGeometry::from_ratios(w0_over_Lz, Lz_over_zR, L_over_Lz);
        c.sched = control::RotationSchedule::for_switching_time(theta0, T_over_delta, 1.0, c.geom.Lz, 1e-3);
        // the schedule recomputes δ through a division chain; pin it exactly
        c.delta = control::switching_time(c.sched, c.geom.Lz);
        c.p_min = -p_pad;
        c.p_max = static_cast<int>(std::ceil(T_over_delta * L_over_Lz - 1e-9)) + p_pad;
        return c;
    }
};

struct SimState {
    double t = 0.0;
    std::vector<cplx> E;  ///< cavity amplitudes, aligned with cfg.modes
    std::vector<cplx> S;  ///< spin amplitudes, index mode * n_p + (p - p_min)

    static SimState zeros(const SystemConfig& cfg, double t0 = 0.0) {
        SimState s;
        s.t = t0;
        s.E.assign(cfg.n_modes(), cplx{});
        s.S.assign(cfg.n_modes() * cfg.n_p(), cplx{});
        return s;
    }

    [[nodiscard]] cplx& spin(const SystemConfig& cfg, SpinIndex idx) {
        return S[spin_offset(cfg, idx)];
    }
    [[nodiscard]] cplx spin(const SystemConfig& cfg, SpinIndex idx) const { return S[spin_offset(cfg, idx)]; }

    [[nodiscard]] double spin_norm() const {
        double s = 0.0;
        for (const auto& v : S) s += std::norm(v);
        return s;
    }
    [[nodiscard]] double field_norm() const {
        double s = 0.0;
        for (const auto& v : E) s += std::norm(v);
        return s;
    }

    [[nodiscard]] bool finite() const {
        auto ok = [](const cplx& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); };
        return std::isfinite(t) && std::all_of(E.begin(), E.end(), ok) && std::all_of(S.begin(), S.end(), ok);
    }

private:
    static std::size_t spin_offset(const SystemConfig& cfg, SpinIndex idx) {
        if (idx.p < cfg.p_min || idx.p > cfg.p_max) throw std::out_of_range("SimState: p outside configured range");
        return cfg.index_of(idx.mode) * cfg.n_p() + static_cast<std::size_t>(idx.p - cfg.p_min);
    }
};

/// Input field per mode at time t, aligned with cfg.modes.
using DriveFn = std::function<std::vector<cplx>(double)>;

/// 𝓔_out = √(2κ) 𝓔_cav − 𝓔_in at the coupling mirror.
inline cplx input_output(cplx E_cav, cplx E_in, double kappa) {
    if (!(kappa > 0.0)) throw std::invalid_argument("input_output: kappa must be positive");
    return std::sqrt(2.0 * kappa) * E_cav - E_in;
}

/// Right-hand side evaluator for one configuration. For the full model the
/// Gauss-Hermite tables are built once here and the quadrature accuracy is
/// certified at the largest |q_x| reached by the scan.
///
/// Sums run over modes in configuration order and over p ascending, so the
/// result is independent of how callers schedule evaluations.
class Model {
public:
    explicit Model(SystemConfig cfg) : cfg_(std::move(cfg)) {
        cfg_.validate();
        if (cfg_.model == ModelKind::full) {
            int order = 0;
            for (const auto& m : cfg_.modes) order = std::max({order, m.m, m.n});
            table_.emplace(order, cfg_.geom.w0);
            const double qmax = std::abs(control::q_transverse(-cfg_.sched.T, cfg_.sched.with_phase(control::ScanPhase::storage)));
            for (const auto& a : cfg_.modes)
                for (const auto& b : cfg_.modes) (void)modes::transverse_overlap(qmax, a, b, cfg_.geom);
        }
    }

    [[nodiscard]] const SystemConfig& config() const { return cfg_; }

    /// Same model with the schedule switched to another scan phase.
    [[nodiscard]] Model with_phase(control::ScanPhase p) const {
        Model m = *this;
        m.cfg_.sched.phase = p;
        return m;
    }

    [[nodiscard]] SimState derivative(const SimState& s, std::span<const cplx> drive) const {
        if (drive.size() != cfg_.n_modes()) throw std::invalid_argument("Model: drive size mismatch");
        return cfg_.model == ModelKind::simplified ? simplified(s, drive) : full(s, drive);
    }

    [[nodiscard]] SimState step(const SimState& s, const DriveFn& drive, double dt) const {
        if (!(dt > 0.0)) throw std::invalid_argument("step_rk4: dt must be positive");
        if (!s.finite()) throw NumericalError("step_rk4: non-finite state at t=" + std::to_string(s.t));
        const double t = s.t;
        const auto d0 = drive(t);
        const auto dh = drive(t + 0.5 * dt);
        const auto d1 = drive(t + dt);

        const SimState k1 = derivative(s, d0);
        const SimState k2 = derivative(axpy(s, 0.5 * dt, k1, t + 0.5 * dt), dh);
        const SimState k3 = derivative(axpy(s, 0.5 * dt, k2, t + 0.5 * dt), dh);
        const SimState k4 = derivative(axpy(s, dt, k3, t + dt), d1);

        SimState out = s;
        out.t = t + dt;
        const double c = dt / 6.0;
        for (std::size_t i = 0; i < out.E.size(); ++i)
            out.E[i] += c * (k1.E[i] + 2.0 * k2.E[i] + 2.0 * k3.E[i] + k4.E[i]);
        for (std::size_t i = 0; i < out.S.size(); ++i)
            out.S[i] += c * (k1.S[i] + 2.0 * k2.S[i] + 2.0 * k3.S[i] + k4.S[i]);
        if (!out.finite()) throw NumericalError("step_rk4: integration produced non-finite state");
        return out;
    }

    /// B_{field, spin}(t) as used by the right-hand side.
    [[nodiscard]] cplx kernel(double t, std::size_t field, std::size_t spin_mode, int p) const {
        const double t_eff = control::mapped_time(cfg_.sched, t);
        const double lf = modes::longitudinal_factor(t_eff, cfg_.modes[field], {cfg_.modes[spin_mode], p}, cfg_.delta,
                                                     cfg_.geom);
        if (cfg_.model == ModelKind::simplified) return field == spin_mode ? cplx(lf) : cplx{};
        return lf * table_->overlap(control::q_transverse(t, cfg_.sched), cfg_.modes[field], cfg_.modes[spin_mode]);
    }

private:
    static SimState axpy(const SimState& s, double h, const SimState& k, double t) {
        SimState r = s;
        r.t = t;
        for (std::size_t i = 0; i < r.E.size(); ++i) r.E[i] += h * k.E[i];
        for (std::size_t i = 0; i < r.S.size(); ++i) r.S[i] += h * k.S[i];
        return r;
    }

    void sinc_row(double t_eff, std::vector<double>& row, double gouy_shift) const {
        const std::size_t np = cfg_.n_p();
        row.resize(np);
        const double dtp = cfg_.delta * cfg_.geom.Lz / cfg_.geom.L;
        for (std::size_t k = 0; k < np; ++k) {
            const double tp = (cfg_.p_min + static_cast<int>(k)) * dtp;
            row[k] = modes::sinc((t_eff + tp + gouy_shift) * std::numbers::pi / cfg_.delta);
        }
    }

    SimState simplified(const SimState& s, std::span<const cplx> drive) const {
        const double t = s.t;
        const double t_eff = control::mapped_time(cfg_.sched, t);
        const std::size_t np = cfg_.n_p();
        const cplx G = cfg_.coupling();
        const cplx I(0.0, 1.0);
        std::vector<double> sc;
        sinc_row(t_eff, sc, 0.0);

        SimState d = s;
        for (std::size_t i = 0; i < cfg_.n_modes(); ++i) {
            const double kap = cfg_.kappa[i];
            const cplx ph = std::polar(1.0, cfg_.delta_shift[i] * t);
            const cplx* Si = s.S.data() + i * np;
            cplx sum = 0.0;
            for (std::size_t k = 0; k < np; ++k) sum += sc[k] * Si[k];
            d.E[i] = -kap * s.E[i] + std::sqrt(2.0 * kap) * drive[i] + I * G * ph * sum;
            const cplx src = I * std::conj(G) * s.E[i] * std::conj(ph);
            cplx* dSi = d.S.data() + i * np;
            for (std::size_t k = 0; k < np; ++k) dSi[k] = -cfg_.gammaR * Si[k] + src * sc[k];
        }
        return d;
    }

    SimState full(const SimState& s, std::span<const cplx> drive) const {
        const double t = s.t;
        const double t_eff = control::mapped_time(cfg_.sched, t);
        const double qx = control::q_transverse(t, cfg_.sched);
        const std::size_t nm = cfg_.n_modes();
        const std::size_t np = cfg_.n_p();
        const cplx G = cfg_.coupling();
        const cplx I(0.0, 1.0);
        const double gouy_unit = cfg_.delta * cfg_.geom.Lz / (2.0 * std::numbers::pi * cfg_.geom.rayleigh_range());

        std::vector<cplx> ph(nm);
        for (std::size_t i = 0; i < nm; ++i) ph[i] = std::polar(1.0, cfg_.delta_shift[i] * t);

        SimState d = s;
        for (std::size_t i = 0; i < nm; ++i) d.E[i] = -cfg_.kappa[i] * s.E[i] + std::sqrt(2.0 * cfg_.kappa[i]) * drive[i];
        for (std::size_t k = 0; k < d.S.size(); ++k) d.S[k] = -cfg_.gammaR * s.S[k];

        std::vector<double> sc;
        for (std::size_t i = 0; i < nm; ++i) {
            for (std::size_t j = 0; j < nm; ++j) {
                const cplx ov = table_->overlap(qx, cfg_.modes[i], cfg_.modes[j]);
                if (std::abs(ov) < 1e-300) continue;
                const int dorder = cfg_.modes[j].order() - cfg_.modes[i].order();
                sinc_row(t_eff, sc, dorder * gouy_unit);
                const cplx* Sj = s.S.data() + j * np;
                cplx* dSj = d.S.data() + j * np;
                cplx sum = 0.0;
                for (std::size_t k = 0; k < np; ++k) sum += sc[k] * Sj[k];
                d.E[i] += I * G * ph[i] * ov * sum;
                const cplx src = I * std::conj(G) * s.E[i] * std::conj(ph[i]) * std::conj(ov);
                for (std::size_t k = 0; k < np; ++k) dSj[k] += src * sc[k];
            }
        }
        return d;
    }

    SystemConfig cfg_;
    std::optional<modes::OverlapTable> table_;
};

/// Transversely decoupled equations (diagonal sinc kernel).
inline SimState rhs_simplified(const SimState& s, std::span<const cplx> drive, const SystemConfig& cfg) {
    if (cfg.model != ModelKind::simplified) throw std::invalid_argument("rhs_simplified: config model is not simplified");
    return Model(cfg).derivative(s, drive);
}

/// Equations with the full kernel B_{mn,m'n'p}(t), including transverse
/// cross-talk through the grating overlap.
inline SimState rhs_full(const SimState& s, std::span<const cplx> drive, const SystemConfig& cfg) {
    if (cfg.model != ModelKind::full) throw std::invalid_argument("rhs_full: config model is not full");
    return Model(cfg).derivative(s, drive);
}

/// One classical fourth-order Runge-Kutta step of the configured model.
inline SimState step_rk4(const SimState& s, const DriveFn& drive, const SystemConfig& cfg, double dt) {
    return Model(cfg).step(s, drive, dt);
}

} // namespace cavmem::dynamics
