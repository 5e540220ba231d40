#pragma once

// Storage followed by retrieval: pulse synthesis, phase sequencing and
// assembly of the input/output records.

#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cavmem/control.hpp"
#include "cavmem/dynamics.hpp"
#include "cavmem/metrics.hpp"

namespace cavmem::protocol {

using dynamics::DriveFn;
using dynamics::Model;
using dynamics::SimState;
using dynamics::SystemConfig;

enum class Direction { backward, forward };

inline std::string to_string(Direction d) { return d == Direction::backward ? "backward" : "forward"; }

inline control::ScanPhase retrieval_phase(Direction d) {
    return d == Direction::backward ? control::ScanPhase::retrieval_backward : control::ScanPhase::retrieval_forward;
}

/// Gaussian input pulse. `fwhm` is the full width at half maximum of the
/// intensity envelope.
struct PulseSpec {
    std::vector<std::pair<ModeIndex, cplx>> amplitudes{{ModeIndex{0, 0}, cplx{1.0, 0.0}}};
    double fwhm = 1.0;
    double center = -15.0;

    void validate() const {
        if (amplitudes.empty()) throw std::invalid_argument("PulseSpec: no mode amplitudes");
        double s = 0.0;
        for (const auto& [m, a] : amplitudes) s += std::norm(a);
        if (std::abs(s - 1.0) > 1e-9) throw std::invalid_argument("PulseSpec: mode weights must satisfy sum |A|^2 = 1");
        if (!(fwhm > 0.0)) throw std::invalid_argument("PulseSpec: fwhm must be positive");
    }

    /// Unit-energy Gaussian envelope with intensity FWHM `fwhm`.
    [[nodiscard]] double envelope(double t) const {
        const double norm = std::pow(4.0 * std::numbers::ln2 / (std::numbers::pi * fwhm * fwhm), 0.25);
        const double s = (t - center) / fwhm;
        return norm * std::exp(-2.0 * std::numbers::ln2 * s * s);
    }

    /// Fraction of pulse energy inside [lo, hi].
    [[nodiscard]] double energy_fraction(double lo, double hi) const {
        const double c = std::sqrt(4.0 * std::numbers::ln2) / fwhm;
        return 0.5 * (std::erf(c * (hi - center)) - std::erf(c * (lo - center)));
    }

    /// RMS spectral half-width-like bandwidth 4 ln2 / fwhm (angular).
    [[nodiscard]] double bandwidth() const { return 4.0 * std::numbers::ln2 / fwhm; }
};

inline constexpr double kWindowEnergyTolerance = 1e-6;

/// 𝓔^in_mn(t) = A_mn × unit-energy Gaussian.
inline std::map<ModeIndex, cplx> make_input(const PulseSpec& spec, double t) {
    std::map<ModeIndex, cplx> out;
    const double env = spec.envelope(t);
    for (const auto& [m, a] : spec.amplitudes) out[m] = a * env;
    return out;
}

/// Drive callback aligned with cfg.modes.
inline DriveFn make_drive(const PulseSpec& spec, const SystemConfig& cfg) {
    std::vector<std::pair<std::size_t, cplx>> slots;
    for (const auto& [m, a] : spec.amplitudes) slots.emplace_back(cfg.index_of(m), a);
    const std::size_t n = cfg.n_modes();
    return [spec, slots, n](double t) {
        std::vector<cplx> d(n, cplx{});
        const double env = spec.envelope(t);
        for (const auto& [i, a] : slots) d[i] += a * env;
        return d;
    };
}

struct IntegratorOptions {
    double dt_ratio = 200.0;  ///< steps per switching time
};

struct TimeGrid {
    double dt = 0.0;
    std::size_t steps = 0;
};

inline TimeGrid make_grid(const SystemConfig& cfg, const IntegratorOptions& opts) {
    if (!(opts.dt_ratio > 0.0)) throw std::invalid_argument("IntegratorOptions: dt_ratio must be positive");
    const double T = cfg.sched.T;
    const double dt0 = cfg.delta / opts.dt_ratio;
    const auto n = static_cast<std::size_t>(std::max(1.0, std::round(T / dt0)));
    return {T / static_cast<double>(n), n};
}

struct StorageResult {
    SimState final_state;
    ModeSeries input;   ///< 𝓔^in on [-T, 0]
    ModeSeries output;  ///< 𝓔^out (reflection and leakage) on [-T, 0]
    bool pulse_truncated = false;
};

/// Integrate [-T, 0] from S(-T) = 0 with an arbitrary drive.
inline StorageResult run_storage(const DriveFn& drive, const SystemConfig& cfg, const IntegratorOptions& opts = {}) {
    const Model model = Model(cfg).with_phase(control::ScanPhase::storage);
    const auto grid = make_grid(cfg, opts);
    const double T = cfg.sched.T;
    const std::size_t nm = cfg.n_modes();

    StorageResult r;
    r.input = ModeSeries::zeros(cfg.modes, -T, grid.dt, grid.steps + 1);
    r.output = ModeSeries::zeros(cfg.modes, -T, grid.dt, grid.steps + 1);

    SimState s = SimState::zeros(cfg, -T);
    auto record = [&](std::size_t k, const SimState& st) {
        const auto d = drive(st.t);
        for (std::size_t i = 0; i < nm; ++i) {
            r.input.values[i][k] = d[i];
            r.output.values[i][k] = dynamics::input_output(st.E[i], d[i], cfg.kappa[i]);
        }
    };
    record(0, s);
    for (std::size_t k = 1; k <= grid.steps; ++k) {
        s = model.step(s, drive, grid.dt);
        s.t = -T + static_cast<double>(k) * grid.dt;  // avoid drift from repeated addition
        record(k, s);
    }
    r.final_state = std::move(s);
    r.final_state.t = 0.0;
    return r;
}

inline StorageResult run_storage(const PulseSpec& spec, const SystemConfig& cfg, const IntegratorOptions& opts = {}) {
    spec.validate();
    auto r = run_storage(make_drive(spec, cfg), cfg, opts);
    r.pulse_truncated = spec.energy_fraction(-cfg.sched.T, 0.0) < 1.0 - kWindowEnergyTolerance;
    return r;
}

struct RetrievalResult {
    SimState final_state;
    ModeSeries output;  ///< 𝓔^out on [0, T]
};

/// Integrate [0, T] with zero input under the chosen retrieval scan.
inline RetrievalResult run_retrieval(const SimState& state0, const SystemConfig& cfg, Direction direction,
                                     const IntegratorOptions& opts = {}) {
    const Model model = Model(cfg).with_phase(retrieval_phase(direction));
    const auto grid = make_grid(cfg, opts);
    const std::size_t nm = cfg.n_modes();
    const DriveFn zero = [nm](double) { return std::vector<cplx>(nm, cplx{}); };

    RetrievalResult r;
    r.output = ModeSeries::zeros(cfg.modes, 0.0, grid.dt, grid.steps + 1);
    SimState s = state0;
    s.t = 0.0;
    auto record = [&](std::size_t k, const SimState& st) {
        for (std::size_t i = 0; i < nm; ++i) r.output.values[i][k] = std::sqrt(2.0 * cfg.kappa[i]) * st.E[i];
    };
    record(0, s);
    for (std::size_t k = 1; k <= grid.steps; ++k) {
        s = model.step(s, zero, grid.dt);
        s.t = static_cast<double>(k) * grid.dt;
        record(k, s);
    }
    r.final_state = std::move(s);
    return r;
}

struct SimOutput {
    ModeSeries E_in;   ///< on [-T, T]; zero for t > 0
    ModeSeries E_out;  ///< on [-T, T]; t < 0 is storage-phase reflection
    double N_in = 0.0;
    double N_out = 0.0;
    double eta = 0.0;
    double Fprime = 0.0;
    double F = 0.0;
    double tbar = 0.0;
    double storage_leakage = 0.0;
    bool flat_correlation = false;
    bool pulse_truncated = false;
    std::vector<double> eta_per_mode;  ///< aligned with E_out.modes; 0 where no input
    std::map<SpinIndex, cplx> stored_spin_snapshot;
    SimState stored_state;
};

inline SimOutput assemble(const StorageResult& st, const RetrievalResult& rt, const SystemConfig& cfg) {
    SimOutput o;
    const std::size_t n = st.input.size() - 1;
    const double T = cfg.sched.T;
    o.E_in = ModeSeries::zeros(cfg.modes, -T, st.input.dt, 2 * n + 1);
    o.E_out = ModeSeries::zeros(cfg.modes, -T, st.input.dt, 2 * n + 1);
    for (std::size_t i = 0; i < cfg.n_modes(); ++i) {
        for (std::size_t k = 0; k <= n; ++k) {
            o.E_in.values[i][k] = st.input.values[i][k];
            o.E_out.values[i][k] = st.output.values[i][k];
        }
        for (std::size_t k = 0; k <= n; ++k) o.E_out.values[i][n + k] = rt.output.values[i][k];
    }
    const auto fom = metrics::evaluate(o.E_out, o.E_in, T);
    o.N_in = fom.N_in;
    o.N_out = fom.N_out;
    o.eta = fom.eta;
    o.Fprime = fom.Fprime;
    o.F = fom.F;
    o.tbar = fom.tbar;
    o.flat_correlation = fom.flat_correlation;
    o.storage_leakage = metrics::photon_number(st.output, -T, 0.0).value;

    for (std::size_t i = 0; i < cfg.n_modes(); ++i) {
        ModeSeries in1, out1;
        in1.t0 = out1.t0 = -T;
        in1.dt = out1.dt = o.E_in.dt;
        in1.modes = out1.modes = {cfg.modes[i]};
        in1.values = {o.E_in.values[i]};
        out1.values = {o.E_out.values[i]};
        const double ni = metrics::photon_number(in1, -T, 0.0).value;
        const double no = metrics::photon_number(out1, 0.0, T).value;
        o.eta_per_mode.push_back(ni > 0.0 ? no / ni : 0.0);
    }
    for (std::size_t i = 0; i < cfg.n_modes(); ++i)
        for (int p = cfg.p_min; p <= cfg.p_max; ++p) {
            const SpinIndex idx{cfg.modes[i], p};
            o.stored_spin_snapshot[idx] = st.final_state.spin(cfg, idx);
        }
    o.stored_state = st.final_state;
    o.pulse_truncated = st.pulse_truncated;
    return o;
}

/// Storage on [-T, 0] then retrieval on [0, T], with figures of merit.
inline SimOutput run_protocol(const DriveFn& drive, const SystemConfig& cfg, Direction direction,
                              const IntegratorOptions& opts = {}) {
    const auto st = run_storage(drive, cfg, opts);
    const auto rt = run_retrieval(st.final_state, cfg, direction, opts);
    return assemble(st, rt, cfg);
}

inline SimOutput run_protocol(const PulseSpec& spec, const SystemConfig& cfg, Direction direction,
                              const IntegratorOptions& opts = {}) {
    const auto st = run_storage(spec, cfg, opts);
    const auto rt = run_retrieval(st.final_state, cfg, direction, opts);
    return assemble(st, rt, cfg);
}

} // namespace cavmem::protocol
