#pragma once

// Figures of merit: photon numbers, efficiency, envelope correlation and
// the delay that maximizes it.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "cavmem/geometry.hpp"

namespace cavmem {

using cplx = std::complex<double>;

/// Per-mode complex samples on a uniform time grid t_k = t0 + k·dt.
struct ModeSeries {
    double t0 = 0.0;
    double dt = 1.0;
    std::vector<ModeIndex> modes;
    std::vector<std::vector<cplx>> values;  ///< values[mode][k]

    [[nodiscard]] std::size_t size() const { return values.empty() ? 0 : values.front().size(); }
    [[nodiscard]] double time(std::size_t k) const { return t0 + static_cast<double>(k) * dt; }
    [[nodiscard]] double t_end() const { return time(size() == 0 ? 0 : size() - 1); }

    static ModeSeries zeros(std::vector<ModeIndex> modes, double t0, double dt, std::size_t n) {
        ModeSeries s;
        s.t0 = t0;
        s.dt = dt;
        s.values.assign(modes.size(), std::vector<cplx>(n, cplx{}));
        s.modes = std::move(modes);
        return s;
    }

    /// Cubic (Catmull-Rom) interpolation; zero outside the sampled range.
    [[nodiscard]] cplx interpolate(std::size_t mode, double t) const {
        const auto& v = values[mode];
        const double u = (t - t0) / dt;
        if (u < -1.0 || u > static_cast<double>(v.size())) return {};
        const double fl = std::floor(u);
        const auto k = static_cast<long>(fl);
        const double s = u - fl;
        auto at = [&](long i) -> cplx {
            return (i < 0 || i >= static_cast<long>(v.size())) ? cplx{} : v[static_cast<std::size_t>(i)];
        };
        const cplx p0 = at(k - 1), p1 = at(k), p2 = at(k + 1), p3 = at(k + 2);
        return p1 + 0.5 * s * (p2 - p0 + s * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 + s * (3.0 * (p1 - p2) + p3 - p0)));
    }
};

namespace metrics {

struct FigureOfMerit {
    double N_in = 0.0;
    double N_out = 0.0;
    double eta = 0.0;
    double Fprime = 0.0;
    double F = 0.0;
    double tbar = 0.0;
    bool flat_correlation = false;
};

struct PhotonNumber {
    double value = 0.0;
    bool truncated = false;  ///< |𝓔| at a window edge exceeds 1e-4 of the peak
};

inline constexpr double kEdgeTolerance = 1e-4;

/// Σ_mn ∫_window |𝓔_mn|² dt by the trapezoid rule over grid samples inside
/// [t_lo, t_hi].
inline PhotonNumber photon_number(const ModeSeries& s, double t_lo, double t_hi) {
    PhotonNumber r;
    const double eps = 1e-9 * s.dt;
    double peak = 0.0, edge = 0.0;
    for (std::size_t m = 0; m < s.values.size(); ++m) {
        const auto& v = s.values[m];
        double sum = 0.0;
        long first = -1, last = -1;
        for (std::size_t k = 0; k < v.size(); ++k) {
            const double t = s.time(k);
            if (t < t_lo - eps || t > t_hi + eps) continue;
            if (first < 0) first = static_cast<long>(k);
            last = static_cast<long>(k);
            peak = std::max(peak, std::abs(v[k]));
        }
        if (first < 0) continue;
        for (long k = first; k <= last; ++k) {
            const double w = (k == first || k == last) ? 0.5 : 1.0;
            sum += w * std::norm(v[static_cast<std::size_t>(k)]);
        }
        if (first == last) sum = 0.0;
        r.value += sum * s.dt;
        edge = std::max({edge, std::abs(v[static_cast<std::size_t>(first)]), std::abs(v[static_cast<std::size_t>(last)])});
    }
    r.truncated = peak > 0.0 && edge > kEdgeTolerance * peak;
    return r;
}

inline void check_compatible(const ModeSeries& out, const ModeSeries& in) {
    if (out.modes != in.modes) throw std::invalid_argument("metrics: series carry different mode sets");
    if (std::abs(out.dt - in.dt) > 1e-12 * out.dt) throw std::invalid_argument("metrics: series use different grids");
}

/// Un-normalized overlap Σ_mn ∫_{t≥0} 𝓔_out*(t) 𝓔_in(t − t̄) dt.
inline cplx correlation_amplitude(const ModeSeries& out, const ModeSeries& in, double tbar) {
    check_compatible(out, in);
    const double eps = 1e-9 * out.dt;
    cplx total = 0.0;
    for (std::size_t m = 0; m < out.values.size(); ++m) {
        const auto& v = out.values[m];
        long first = -1, last = -1;
        for (std::size_t k = 0; k < v.size(); ++k)
            if (out.time(k) >= -eps) {
                if (first < 0) first = static_cast<long>(k);
                last = static_cast<long>(k);
            }
        if (first < 0 || first == last) continue;
        cplx sum = 0.0;
        for (long k = first; k <= last; ++k) {
            const auto ku = static_cast<std::size_t>(k);
            const double w = (k == first || k == last) ? 0.5 : 1.0;
            sum += w * std::conj(v[ku]) * in.interpolate(m, out.time(ku) - tbar);
        }
        total += sum * out.dt;
    }
    return total;
}

/// F′(t̄) = |Σ ∫₀^∞ 𝓔_out*(t) 𝓔_in(t − t̄) dt|² / (N_in N_out), with N_in
/// taken over t ≤ 0 and N_out over t ≥ 0.
inline double fidelity_correlation(const ModeSeries& out, const ModeSeries& in, double tbar) {
    const double n_in = photon_number(in, -std::numeric_limits<double>::infinity(), 0.0).value;
    const double n_out = photon_number(out, 0.0, std::numeric_limits<double>::infinity()).value;
    if (!(n_in > 0.0) || !(n_out > 0.0)) return 0.0;
    return std::norm(correlation_amplitude(out, in, tbar)) / (n_in * n_out);
}

struct DelaySearch {
    double tbar = 0.0;
    double Fprime = 0.0;
    bool flat = false;  ///< correlation has < 1e-12 dynamic range; t̄ reported as 0
};

/// Maximize F′ over t̄ ∈ [lo, hi]: scan with step 5·dt, then golden-section
/// refinement to dt/10.
inline DelaySearch find_tbar(const ModeSeries& out, const ModeSeries& in, double lo, double hi) {
    if (!(hi >= lo)) throw std::invalid_argument("find_tbar: empty search interval");
    const double step = 5.0 * out.dt;
    const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step)) + 1;
    double best_t = lo, best = -1.0, worst = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
        const double t = lo + static_cast<double>(k) * step;
        const double f = fidelity_correlation(out, in, t);
        if (f > best) {
            best = f;
            best_t = t;
        }
        worst = std::min(worst, f);
    }
    if (best - worst < 1e-12) return {0.0, best, true};

    constexpr double inv_phi = 0.6180339887498949;
    double a = std::max(lo, best_t - step), b = std::min(hi, best_t + step);
    double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
    double fc = fidelity_correlation(out, in, c), fd = fidelity_correlation(out, in, d);
    while (b - a > out.dt / 10.0) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = fidelity_correlation(out, in, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = fidelity_correlation(out, in, d);
        }
    }
    const double tm = 0.5 * (a + b);
    const double fm = fidelity_correlation(out, in, tm);
    if (fm >= best) return {tm, fm, false};
    return {best_t, best, false};
}

/// η, F′, F and t̄ for an input series (t ≤ 0) and output series (t ≥ 0);
/// the delay search spans [0, 2T].
inline FigureOfMerit evaluate(const ModeSeries& out, const ModeSeries& in, double T) {
    FigureOfMerit f;
    f.N_in = photon_number(in, -std::numeric_limits<double>::infinity(), 0.0).value;
    f.N_out = photon_number(out, 0.0, std::numeric_limits<double>::infinity()).value;
    f.eta = f.N_in > 0.0 ? f.N_out / f.N_in : 0.0;
    if (f.N_out > 0.0 && f.N_in > 0.0) {
        const auto s = find_tbar(out, in, 0.0, 2.0 * T);
        f.tbar = s.tbar;
        f.Fprime = s.Fprime;
        f.flat_correlation = s.flat;
    } else {
        f.flat_correlation = true;
    }
    f.F = f.eta * f.Fprime;
    return f;
}

} // namespace metrics
} // namespace cavmem
