#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "cavmem/analytic.hpp"
#include "cavmem/metrics.hpp"
#include "cavmem/protocol.hpp"

using namespace cavmem;
using namespace cavmem::analytic;

namespace {
constexpr double kPi = std::numbers::pi;

ModeSeries gaussian_input(double fwhm, double center = -15.0, double T = 30.0, double dt = 0.01) {
    protocol::PulseSpec p;
    p.fwhm = fwhm;
    p.center = center;
    const auto n = static_cast<std::size_t>(std::llround(T / dt));
    auto s = ModeSeries::zeros({{0, 0}}, -T, dt, n + 1);
    for (std::size_t k = 0; k <= n; ++k) s.values[0][k] = p.envelope(s.time(k));
    return s;
}

double energy(const ModeSeries& s) { return metrics::photon_number(s, -1e300, 1e300).value; }
} // namespace

TEST(CollectiveRate, SolidStateImpedanceMatch) {
    EXPECT_NEAR(collective_rate(5e19 * 2e-5, 2e-7), 1e8, 1e-4);
    EXPECT_NEAR(collective_rate(3.0, 4.0) * 2.0, collective_rate(3.0, 8.0), 1e-15);
    EXPECT_EQ(collective_rate(0.0, 1.0), 0.0);
    EXPECT_THROW((void)collective_rate(1.0, 0.0), std::invalid_argument);
}

TEST(EchoFactor, UnityOnlyAtImpedanceMatch) {
    EXPECT_EQ(echo_amplitude_factor(4.2, 4.2), 1.0);
    // κ = 3Γ: write and read amplitudes 2√3/4 each
    EXPECT_NEAR(std::pow(echo_amplitude_factor(1.0, 3.0), 2), 0.5625, 1e-15);
    double prev_slope = 1.0;
    bool crossed = false;
    for (double k = 0.2; k < 5.0; k += 0.1) {
        const double slope = echo_amplitude_factor(1.0, k + 0.05) - echo_amplitude_factor(1.0, k - 0.05);
        if (prev_slope > 0.0 && slope <= 0.0) {
            EXPECT_NEAR(k, 1.0, 0.1);
            crossed = true;
        }
        prev_slope = slope;
        EXPECT_GT(echo_amplitude_factor(1.0, k), 0.0);
        EXPECT_LE(echo_amplitude_factor(1.0, k), 1.0);
    }
    EXPECT_TRUE(crossed);
}

TEST(Echo, BackwardImpedanceMatchedIsLossless) {
    const auto in = gaussian_input(5.0);
    const auto out = echo_backward(in, 4.2, 4.2, 0.0, 30.0);
    EXPECT_NEAR(energy(out) / energy(in), 1.0, 1e-9);
    EXPECT_NEAR(std::abs(out.values[0][1500] + in.values[0][1500]), 0.0, 1e-12);
}

TEST(Echo, ForwardUniformDecayKeepsShape) {
    const auto in = gaussian_input(2.0);
    const double T = 30.0, gR = 0.5 / T;
    const auto out = echo_forward(in, 1.0, 1.0, gR, T);
    EXPECT_NEAR(energy(out) / energy(in), std::exp(-1.0), 1e-9);
    auto shifted = out;
    const auto fom = metrics::evaluate(
        [&] {
            auto full = ModeSeries::zeros(in.modes, -T, in.dt, 2 * in.size() - 1);
            for (std::size_t k = 0; k < in.size(); ++k) full.values[0][k] = 0.0;
            for (std::size_t k = 0; k < out.size(); ++k) full.values[0][in.size() - 1 + k] = out.values[0][k];
            return full;
        }(),
        [&] {
            auto full = ModeSeries::zeros(in.modes, -T, in.dt, 2 * in.size() - 1);
            for (std::size_t k = 0; k < in.size(); ++k) full.values[0][k] = in.values[0][k];
            return full;
        }(),
        T);
    EXPECT_NEAR(fom.Fprime, 1.0, 1e-12);
    EXPECT_NEAR(fom.tbar, T, 1e-3);
}

TEST(StoredSpin, ZeroInputAndTails) {
    StorageMapInput in;
    in.E_in = [](double) { return cplx{}; };
    in.Gamma = in.kappa = 4.2;
    in.p_min = -8;
    in.p_max = 38;
    for (const auto& [p, v] : stored_spin_analytic(in).S) EXPECT_EQ(v, cplx{});

    protocol::PulseSpec spec;
    spec.fwhm = 5.0;
    spec.center = -15.0;
    in.E_in = [&](double t) { return cplx(spec.envelope(t)); };
    in.bandwidth = spec.bandwidth();
    const auto r = stored_spin_analytic(in);
    EXPECT_TRUE(r.valid);
    int argmax = 0;
    double peak = 0.0;
    for (const auto& [p, v] : r.S)
        if (std::abs(v) > peak) {
            peak = std::abs(v);
            argmax = p;
        }
    EXPECT_EQ(argmax, 15);
    EXPECT_LE(std::abs(r.S.at(-8)), 1e-6 * peak);
    EXPECT_LE(std::abs(r.S.at(38)), 1e-6 * peak);
    // impedance matched: i G √(2κ) δ/(2κ) = i at peak amplitude scale
    EXPECT_NEAR(std::abs(r.S.at(15) / spec.envelope(-15.0)), 1.0, 1e-12);
    EXPECT_NEAR(std::arg(r.S.at(15)), kPi / 2, 1e-12);
}

TEST(StoredSpin, ValidityFlagForNarrowCavity) {
    StorageMapInput in;
    in.E_in = [](double) { return cplx{1.0}; };
    in.Gamma = in.kappa = 0.5;
    in.bandwidth = 4.0 * std::numbers::ln2;
    EXPECT_FALSE(stored_spin_analytic(in).valid);
}

TEST(RamanRate, Examples) {
    EXPECT_EQ(gammaR_effective(0.3, 5.0, 0.0, 100.0), 0.3);
    EXPECT_NEAR(gammaR_effective(0.0, 2.0, 1.0, 100.0), 2e-4, 1e-18);
    EXPECT_EQ(gammaR_effective(0.0, 0.0, 3.0, 7.0), 0.0);
    EXPECT_THROW((void)gammaR_effective(0.0, 1.0, 1.0, 0.0), std::invalid_argument);
}

TEST(DiffractionLoss, FundamentalModeAtFresnelTen) {
    const double direct = 4.0 * std::sqrt(kPi) * std::sqrt(20.0 * kPi) * std::exp(-40.0 * kPi);
    EXPECT_NEAR(diffraction_loss(0, 10.0) / direct, 1.0, 1e-10);
    EXPECT_NEAR(direct, 1.5e-53, 0.05e-53);
}

TEST(DiffractionLoss, CutoffAtThirty) {
    EXPECT_LE(diffraction_loss(30, 10.0), 1e-4);
    EXPECT_NEAR(diffraction_loss(30, 10.0), 6e-5, 1.5e-5);
    EXPECT_GT(diffraction_loss(31, 10.0), 1e-4);
}

TEST(DiffractionLoss, PairCombination) {
    EXPECT_NEAR(diffraction_loss_pair(0, 0, 10.0) / diffraction_loss(0, 10.0), 2.0, 1e-12);
    const double a = diffraction_loss(30, 10.0), b = diffraction_loss(25, 10.0);
    EXPECT_NEAR(diffraction_loss_pair(30, 25, 10.0), 1.0 - (1.0 - a) * (1.0 - b), 1e-15);
    EXPECT_THROW((void)diffraction_loss(201, 10.0), std::invalid_argument);
    EXPECT_THROW((void)diffraction_loss(3, 0.0), std::invalid_argument);
}

TEST(DiffractionLoss, MonotoneInIndexAndFresnelNumber) {
    for (double nf = 1.0; nf <= 20.0; nf += 0.5) {
        for (int m = 1; m < 40; ++m) {
            const double a = diffraction_loss(m, nf), b = diffraction_loss(m + 1, nf);
            if (a < 1.0) EXPECT_GT(b, a) << m << " " << nf;
        }
    }
    // decreasing in N_F once N_F exceeds (m + 1/2)/(4π), i.e. for every m ≤ 40 at N_F ≥ 3.3
    for (int m = 0; m <= 40; ++m)
        for (double nf = 3.5; nf < 20.0; nf += 0.5) {
            const double a = diffraction_loss(m, nf), b = diffraction_loss(m, nf + 0.5);
            if (a < 1.0) EXPECT_LT(b, a) << m << " " << nf;
            else EXPECT_LE(b, a);
        }
}

TEST(Capacity, SolidStateBudget) {
    const auto r = capacity_estimate({});
    EXPECT_NEAR(r.max_index, 30, 1);
    EXPECT_GT(r.n_transverse, 500);
    EXPECT_LE(r.n_transverse, r.n_transverse_square);
    EXPECT_EQ(r.n_transverse_square, 961);
    EXPECT_NEAR(r.theta_min_deg, 80.0, 0.5);
    EXPECT_NEAR(r.theta_max_deg, 100.0, 0.5);
    EXPECT_NEAR(r.n_pulses, 100, 20);
    EXPECT_NEAR(r.scan_per_pulse, 5.0 * 1.53e-6 / 2.5e-3, 1e-15);
}

TEST(Capacity, MonotoneInLossBudget) {
    int prev_max = -1, prev_n = 0;
    for (double budget : {1e-8, 1e-6, 1e-4, 1e-3, 1e-2}) {
        CapacityInput in;
        in.loss_budget = budget;
        const auto r = capacity_estimate(in);
        EXPECT_GE(r.max_index, prev_max);
        EXPECT_GE(r.n_transverse, prev_n);
        prev_max = r.max_index;
        prev_n = r.n_transverse;
    }
}

TEST(Capacity, NothingFitsAtTinyFresnelNumber) {
    CapacityInput in;
    in.fresnel_number = 0.05;
    const auto r = capacity_estimate(in);
    EXPECT_EQ(r.max_index, -1);
    EXPECT_EQ(r.n_pulses, 0);
    EXPECT_FALSE(r.note.empty());
}

TEST(Design, SolidStatePoint) {
    DesignPoint dp;
    dp.g2N = 5e19;
    const auto r = design_point(dp);
    EXPECT_NEAR(r.Gamma, 1e8, 1e-3);
    EXPECT_NEAR(r.impedance_ratio, 1.0, 1e-12);
    EXPECT_NEAR(r.Omega_over_2pi / 4.5e5, 1.0, 0.05);
    EXPECT_GT(r.intensity_W_cm2, 65.0 / 2);
    EXPECT_LT(r.intensity_W_cm2, 65.0 * 2);
    EXPECT_GT(r.power, 1.6 / 2);
    EXPECT_LT(r.power, 1.6 * 2);
    EXPECT_TRUE(r.raman_valid);
    EXPECT_TRUE(r.bad_cavity_valid);
    EXPECT_NEAR(r.kappa_delta, 20.0, 1e-12);
    EXPECT_GT(r.transmittance_traveling, 1e-3);
    EXPECT_LT(r.transmittance_standing, 5e-3);
}

TEST(Design, DipoleRoundTripsOscillatorStrength) {
    const auto r = design_point({});
    using namespace phys;
    const double f = 2.0 * m_e * r.omega * r.dipole * r.dipole / (3.0 * hbar * e * e);
    EXPECT_NEAR(f, 2e-7, 1e-18);
    EXPECT_NEAR(r.g2N, r.g2N_from_f, 0.0);
    EXPECT_NEAR(r.E0 * r.dipole / hbar, r.Omega, 1e-6 * r.Omega);
}

TEST(Design, Scalings) {
    DesignPoint dp;
    dp.g2N = 5e19;
    const auto base = design_point(dp);
    auto d2 = dp;
    d2.delta *= 2.0;
    EXPECT_NEAR(design_point(d2).Gamma, 2.0 * base.Gamma, 1e-3);
    auto wide = dp;
    wide.beam_diameter *= 2.0;
    EXPECT_NEAR(design_point(wide).power, 4.0 * base.power, 1e-12);
    auto strong = dp;
    strong.Omega_over_Delta_sq = 0.1;
    EXPECT_FALSE(design_point(strong).raman_valid);
    auto slow = dp;
    slow.delta = 1e-9;
    EXPECT_FALSE(design_point(slow).bad_cavity_valid);
    auto bad = dp;
    bad.kappa = -1.0;
    EXPECT_THROW((void)design_point(bad), std::invalid_argument);
}
