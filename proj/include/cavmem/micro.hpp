#pragma once

// Small-N microscopic oracle: per-atom optical (P) and spin (S) coherences
// plus one cavity mode, integrated without adiabatic elimination. Used to
// validate the collective equations.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "cavmem/dynamics.hpp"
#include "cavmem/hg_modes.hpp"
#include "cavmem/metrics.hpp"
#include "cavmem/protocol.hpp"

namespace cavmem::micro {

using cplx = std::complex<double>;

struct MicroParams {
    int n_atoms = 200;
    double Delta = 1200.0;           ///< one-photon detuning, 1/δ units
    double Omega_over_Delta = 0.05;
    double gamma_P = 0.0;
    double gamma_S = 0.0;
    double transverse_box = 0.25;    ///< atoms in |x|,|y| ≤ box·w0
    bool light_shift_compensation = true;
    bool cavity_pull_compensation = true;
    bool stratified = true;          ///< one atom per equal slice in z
    double dt_Delta = 0.25;          ///< target Δ·dt
    std::uint64_t seed = 1;

    [[nodiscard]] double Omega() const { return Omega_over_Delta * Delta; }

    bool operator==(const MicroParams&) const = default;

    void validate() const {
        if (Delta == 0.0 || !std::isfinite(Delta)) throw std::invalid_argument("micro: Delta must be nonzero");
        if (n_atoms < 1) throw std::invalid_argument("micro: n_atoms must be >= 1");
        if (!(Omega_over_Delta > 0.0)) throw std::invalid_argument("micro: Omega_over_Delta must be positive");
        if (!(gamma_P >= 0.0) || !(gamma_S >= 0.0)) throw std::invalid_argument("micro: decay rates must be >= 0");
        if (!(transverse_box > 0.0)) throw std::invalid_argument("micro: transverse_box must be positive");
        if (!(dt_Delta > 0.0)) throw std::invalid_argument("micro: dt_Delta must be positive");
    }
};

struct Atom {
    double x = 0.0, y = 0.0, z = 0.0;
    cplx u;  ///< cavity mode function at the atom
};

struct MicroState {
    double t = 0.0;
    cplx E;
    std::vector<cplx> P;
    std::vector<cplx> S;
};

/// Single-mode microscopic model matched to a collective configuration:
/// g is scaled so that (gΩ/Δ)² Σ|u_j|² = (g_R√N)², and the matching
/// collective decay is γ_S + γ_P Ω²/Δ².
class MicroModel {
public:
    MicroModel(dynamics::SystemConfig cfg, MicroParams params) : cfg_(std::move(cfg)), prm_(params) {
        prm_.validate();
        cfg_.validate();
        if (cfg_.n_modes() != 1) throw std::invalid_argument("micro: exactly one cavity mode is supported");
        std::mt19937_64 rng(prm_.seed);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        const double box = prm_.transverse_box * cfg_.geom.w0;
        const double Lz = cfg_.geom.Lz;
        atoms_.resize(static_cast<std::size_t>(prm_.n_atoms));
        for (int j = 0; j < prm_.n_atoms; ++j) {
            auto& a = atoms_[static_cast<std::size_t>(j)];
            const double s = prm_.stratified ? (j + unit(rng)) / prm_.n_atoms : unit(rng);
            a.z = Lz * (s - 0.5);
            a.x = box * (2.0 * unit(rng) - 1.0);
            a.y = box * (2.0 * unit(rng) - 1.0);
            a.u = modes::eval_mode(cfg_.modes[0], a.x, a.y, a.z, cfg_.geom);
        }
        double su = 0.0;
        for (const auto& a : atoms_) su += std::norm(a.u);
        sum_u2_ = su;
        g_ = cfg_.coupling() * prm_.Delta / (prm_.Omega() * std::sqrt(su));
        shift_S_ = prm_.light_shift_compensation ? prm_.Omega() * prm_.Omega() / prm_.Delta : 0.0;
        pull_ = prm_.cavity_pull_compensation ? g_ * g_ * sum_u2_ / prm_.Delta : 0.0;
    }

    [[nodiscard]] const std::vector<Atom>& atoms() const { return atoms_; }
    [[nodiscard]] double g() const { return g_; }
    [[nodiscard]] double gammaR_effective() const {
        return prm_.gamma_S + prm_.gamma_P * prm_.Omega_over_Delta * prm_.Omega_over_Delta;
    }

    [[nodiscard]] MicroState zeros(double t0) const {
        return {t0, cplx{}, std::vector<cplx>(atoms_.size()), std::vector<cplx>(atoms_.size())};
    }

    /// dP_j = −(γ_P + iΔ)P_j + iΩ S_j e^{iφ_j} + i g u_j 𝓔 e^{−iδ_mn t}
    /// dS_j = −(γ_S + iΔ_S)S_j + iΩ* P_j e^{−iφ_j}
    /// d𝓔  = −κ𝓔 + √(2κ)𝓔_in + i g e^{iδ_mn t} Σ u_j* P_j − i χ 𝓔
    /// where e^{iφ_j} is supplied per atom, Δ_S the light-shift compensation
    /// and χ the cavity-pull compensation.
    void derivative(const MicroState& s, const std::vector<cplx>& grating, cplx drive, MicroState& d) const {
        const cplx I(0.0, 1.0);
        const double W = prm_.Omega();
        const double kap = cfg_.kappa[0];
        const cplx ph = std::polar(1.0, cfg_.delta_shift[0] * s.t);
        const cplx decayP(prm_.gamma_P, prm_.Delta), decayS(prm_.gamma_S, shift_S_);
        const cplx field = I * g_ * s.E * std::conj(ph);
        cplx sum = 0.0;
        for (std::size_t j = 0; j < atoms_.size(); ++j) {
            d.P[j] = -decayP * s.P[j] + I * W * s.S[j] * grating[j] + field * atoms_[j].u;
            d.S[j] = -decayS * s.S[j] + I * W * s.P[j] * std::conj(grating[j]);
            sum += std::conj(atoms_[j].u) * s.P[j];
        }
        d.E = -kap * s.E + std::sqrt(2.0 * kap) * drive + I * g_ * ph * sum - I * pull_ * s.E;
    }

    /// Integrate [t0, t0 + n·dt] under `phase`, recording √(2κ)𝓔 − 𝓔_in every
    /// `stride` steps.
    MicroState integrate(MicroState s, control::ScanPhase phase, const dynamics::DriveFn& drive, double dt,
                         std::size_t n, std::size_t stride, std::vector<cplx>& out) const {
        const auto sched = cfg_.sched.with_phase(phase);
        const double rate = sched.k_c() * sched.angular_rate();
        std::vector<double> kvec(atoms_.size());
        for (std::size_t j = 0; j < atoms_.size(); ++j)
            kvec[j] = rate * (std::cos(sched.theta0) * atoms_[j].x + std::sin(sched.theta0) * atoms_[j].z);
        const double dteff = control::mapped_time(sched, dt) - control::mapped_time(sched, 0.0);

        std::vector<cplx> g0(atoms_.size()), gh(atoms_.size()), g1(atoms_.size()), half(atoms_.size());
        for (std::size_t j = 0; j < atoms_.size(); ++j) half[j] = std::polar(1.0, 0.5 * kvec[j] * dteff);
        auto exact = [&](double t) {
            const double te = control::mapped_time(sched, t);
            for (std::size_t j = 0; j < atoms_.size(); ++j) g0[j] = std::polar(1.0, kvec[j] * te);
        };

        const double kap = cfg_.kappa[0];
        const double t0 = s.t;
        MicroState k1 = s, k2 = s, k3 = s, k4 = s, tmp = s;
        auto axpy = [](const MicroState& a, double h, const MicroState& k, MicroState& r) {
            r.t = a.t + h;
            r.E = a.E + h * k.E;
            for (std::size_t j = 0; j < a.P.size(); ++j) {
                r.P[j] = a.P[j] + h * k.P[j];
                r.S[j] = a.S[j] + h * k.S[j];
            }
        };
        auto record = [&](const MicroState& st) {
            out.push_back(std::sqrt(2.0 * kap) * st.E - drive(st.t)[0]);
        };

        exact(t0);
        record(s);
        for (std::size_t k = 0; k < n; ++k) {
            const double t = t0 + static_cast<double>(k) * dt;
            if (k % 256 == 0) exact(t);  // bound round-off from the multiplicative update
            for (std::size_t j = 0; j < atoms_.size(); ++j) {
                gh[j] = g0[j] * half[j];
                g1[j] = gh[j] * half[j];
            }
            const cplx d0 = drive(t)[0], dh = drive(t + 0.5 * dt)[0], d1 = drive(t + dt)[0];
            derivative(s, g0, d0, k1);
            axpy(s, 0.5 * dt, k1, tmp);
            derivative(tmp, gh, dh, k2);
            axpy(s, 0.5 * dt, k2, tmp);
            derivative(tmp, gh, dh, k3);
            axpy(s, dt, k3, tmp);
            derivative(tmp, g1, d1, k4);
            const double c = dt / 6.0;
            s.E += c * (k1.E + 2.0 * k2.E + 2.0 * k3.E + k4.E);
            for (std::size_t j = 0; j < atoms_.size(); ++j) {
                s.P[j] += c * (k1.P[j] + 2.0 * k2.P[j] + 2.0 * k3.P[j] + k4.P[j]);
                s.S[j] += c * (k1.S[j] + 2.0 * k2.S[j] + 2.0 * k3.S[j] + k4.S[j]);
            }
            s.t = t0 + static_cast<double>(k + 1) * dt;
            std::swap(g0, g1);
            if (!std::isfinite(std::abs(s.E))) throw NumericalError("micro: non-finite cavity field");
            if ((k + 1) % stride == 0) record(s);
        }
        return s;
    }

    [[nodiscard]] const dynamics::SystemConfig& config() const { return cfg_; }
    [[nodiscard]] const MicroParams& params() const { return prm_; }

private:
    dynamics::SystemConfig cfg_;
    MicroParams prm_;
    std::vector<Atom> atoms_;
    double sum_u2_ = 0.0;
    double g_ = 0.0;
    double shift_S_ = 0.0;
    double pull_ = 0.0;
};

struct MicroRun {
    ModeSeries E_store;  ///< reflected/leaked field on [-T, 0]
    ModeSeries E_out;    ///< retrieval output on [0, T], on the collective grid
    double dt = 0.0;   ///< inner step
    std::size_t substeps = 0;
};

/// Storage then retrieval with the microscopic model. Output is sampled on the
/// same grid a collective run with `opts` would use.
inline MicroRun run_micro(const protocol::PulseSpec& spec, const dynamics::SystemConfig& cfg, const MicroParams& params,
                          protocol::Direction direction, const protocol::IntegratorOptions& opts = {}) {
    spec.validate();
    const MicroModel model(cfg, params);
    const auto grid = protocol::make_grid(cfg, opts);
    MicroRun r;
    r.substeps = static_cast<std::size_t>(std::ceil(grid.dt * std::abs(params.Delta) / params.dt_Delta));
    r.dt = grid.dt / static_cast<double>(r.substeps);
    const std::size_t n = grid.steps * r.substeps;

    const auto drive = protocol::make_drive(spec, cfg);
    const dynamics::DriveFn zero = [](double) { return std::vector<cplx>(1, cplx{}); };
    std::vector<cplx> store_out, recall_out;
    store_out.reserve(grid.steps + 1);
    recall_out.reserve(grid.steps + 1);
    auto s = model.integrate(model.zeros(-cfg.sched.T), control::ScanPhase::storage, drive, r.dt, n, r.substeps, store_out);
    s.t = 0.0;
    model.integrate(std::move(s), protocol::retrieval_phase(direction), zero, r.dt, n, r.substeps, recall_out);

    r.E_store = ModeSeries::zeros(cfg.modes, -cfg.sched.T, grid.dt, store_out.size());
    r.E_store.values[0] = std::move(store_out);
    r.E_out = ModeSeries::zeros(cfg.modes, 0.0, grid.dt, recall_out.size());
    r.E_out.values[0] = std::move(recall_out);
    return r;
}

/// Relative L2 distance ‖a − b‖/‖b‖ between two series on the same grid.
inline double relative_l2(const ModeSeries& a, const ModeSeries& b) {
    if (a.values.size() != b.values.size() || a.size() != b.size())
        throw std::invalid_argument("relative_l2: series shapes differ");
    double num = 0.0, den = 0.0;
    for (std::size_t m = 0; m < a.values.size(); ++m)
        for (std::size_t k = 0; k < a.size(); ++k) {
            num += std::norm(a.values[m][k] - b.values[m][k]);
            den += std::norm(b.values[m][k]);
        }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

/// Precession rate ω of a lone atom's spin coherence (S ∝ e^{−iωt}) with the
/// cavity field absent; measures the net two-photon light shift.
inline double spin_precession_rate(const MicroParams& params, double duration) {
    params.validate();
    const double W = params.Omega();
    const double shift = params.light_shift_compensation ? W * W / params.Delta : 0.0;
    const double dt = params.dt_Delta / std::abs(params.Delta);
    const auto n = static_cast<std::size_t>(std::ceil(duration / dt));
    const double h = duration / static_cast<double>(n);
    const cplx I(0.0, 1.0);
    // start on the slow branch so the fast oscillation stays small
    cplx S = 1.0, P = W / params.Delta;
    auto f = [&](cplx p, cplx s, cplx& dp, cplx& ds) {
        dp = -cplx(params.gamma_P, params.Delta) * p + I * W * s;
        ds = -cplx(params.gamma_S, shift) * s + I * W * p;
    };
    double phase = 0.0;  // unwrapped arg S
    for (std::size_t k = 0; k < n; ++k) {
        const cplx prev = S;
        cplx p1, s1, p2, s2, p3, s3, p4, s4;
        f(P, S, p1, s1);
        f(P + 0.5 * h * p1, S + 0.5 * h * s1, p2, s2);
        f(P + 0.5 * h * p2, S + 0.5 * h * s2, p3, s3);
        f(P + h * p3, S + h * s3, p4, s4);
        P += h / 6.0 * (p1 + 2.0 * p2 + 2.0 * p3 + p4);
        S += h / 6.0 * (s1 + 2.0 * s2 + 2.0 * s3 + s4);
        phase += std::arg(S / prev);
    }
    return -phase / duration;
}

} // namespace cavmem::micro
