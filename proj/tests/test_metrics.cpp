#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "cavmem/metrics.hpp"

using namespace cavmem;
using namespace cavmem::metrics;

namespace {
/// Input Gaussian centred at t = −10 and an output copy delayed by `delay`,
/// scaled by c; delays ≥ 15 keep the copy inside t ≥ 0.
std::pair<ModeSeries, ModeSeries> delayed_pair(double delay, cplx c, double T = 20.0, double dt = 0.01) {
    const auto n = static_cast<std::size_t>(std::llround(2 * T / dt));
    auto in = ModeSeries::zeros({{0, 0}}, -T, dt, n + 1);
    auto out = in;
    auto g = [](double t) { return std::exp(-0.5 * (t + 10.0) * (t + 10.0)) * std::polar(1.0, 0.3 * t); };
    for (std::size_t k = 0; k <= n; ++k) {
        const double t = in.time(k);
        if (t <= 0.0) in.values[0][k] = g(t);
        if (t >= 0.0) out.values[0][k] = c * g(t - delay);
    }
    return {out, in};
}
} // namespace

TEST(PhotonNumber, GaussianEnergyAndTruncation) {
    auto s = ModeSeries::zeros({{0, 0}}, -10.0, 0.01, 2001);
    for (std::size_t k = 0; k < s.size(); ++k) s.values[0][k] = std::exp(-0.5 * s.time(k) * s.time(k));
    const auto full = photon_number(s, -10.0, 10.0);
    EXPECT_NEAR(full.value, std::sqrt(std::numbers::pi), 1e-10);
    EXPECT_FALSE(full.truncated);
    const auto half = photon_number(s, -10.0, 0.0);
    EXPECT_NEAR(half.value, 0.5 * std::sqrt(std::numbers::pi), 1e-4);
    EXPECT_TRUE(half.truncated);
    EXPECT_EQ(photon_number(s, 20.0, 30.0).value, 0.0);
}

TEST(PhotonNumber, SumsOverModes) {
    auto s = ModeSeries::zeros({{0, 0}, {1, 0}}, 0.0, 0.5, 5);
    for (auto& v : s.values[0]) v = 1.0;
    for (auto& v : s.values[1]) v = cplx(0.0, 2.0);
    EXPECT_DOUBLE_EQ(photon_number(s, 0.0, 2.0).value, 2.0 + 8.0);
}

TEST(Interpolate, ExactForLinearAndZeroOutside) {
    auto s = ModeSeries::zeros({{0, 0}}, 1.0, 0.25, 41);
    for (std::size_t k = 0; k < s.size(); ++k) s.values[0][k] = cplx(2.0 * s.time(k) - 1.0, -s.time(k));
    for (double t : {2.0, 3.1, 5.77, 9.0})
        EXPECT_NEAR(std::abs(s.interpolate(0, t) - cplx(2.0 * t - 1.0, -t)), 0.0, 1e-12) << t;
    EXPECT_EQ(s.interpolate(0, -5.0), cplx{});
    EXPECT_EQ(s.interpolate(0, 50.0), cplx{});
}

TEST(DelaySearch, RecoversKnownShift) {
    for (double delay : {15.0, 18.345, 23.0}) {
        const auto [out, in] = delayed_pair(delay, 1.0);
        const auto r = find_tbar(out, in, 0.0, 40.0);
        EXPECT_NEAR(r.tbar, delay, 2e-3) << delay;
        EXPECT_NEAR(r.Fprime, 1.0, 1e-6);
        EXPECT_FALSE(r.flat);
    }
}

TEST(DelaySearch, FlatCorrelationFlagged) {
    auto [out, in] = delayed_pair(10.0, 1.0);
    for (auto& v : out.values[0]) v = 0.0;
    const auto r = find_tbar(out, in, 0.0, 40.0);
    EXPECT_TRUE(r.flat);
    EXPECT_EQ(r.tbar, 0.0);
    EXPECT_THROW((void)find_tbar(out, in, 1.0, 0.0), std::invalid_argument);
}

TEST(Evaluate, EfficiencyAndProduct) {
    const auto [out, in] = delayed_pair(22.0, cplx(0.0, 0.9));
    const auto f = evaluate(out, in, 20.0);
    EXPECT_NEAR(f.eta, 0.81, 1e-6);
    EXPECT_NEAR(f.Fprime, 1.0, 1e-6);
    EXPECT_DOUBLE_EQ(f.F, f.eta * f.Fprime);
    EXPECT_NEAR(f.tbar, 22.0, 2e-3);
}

TEST(Evaluate, ZeroOutputIsFlat) {
    auto [out, in] = delayed_pair(12.0, 1.0);
    for (auto& v : out.values[0]) v = 0.0;
    const auto f = evaluate(out, in, 20.0);
    EXPECT_EQ(f.eta, 0.0);
    EXPECT_EQ(f.F, 0.0);
    EXPECT_TRUE(f.flat_correlation);
}

TEST(Evaluate, InvariantUnderOutputScaleAndPhase) {
    const auto [out0, in] = delayed_pair(19.0, 1.0);
    auto distorted = out0;
    for (std::size_t k = 0; k < distorted.size(); ++k) distorted.values[0][k] *= 1.0 + 0.1 * std::sin(0.5 * distorted.time(k));
    const auto base = fidelity_correlation(distorted, in, 19.0);
    for (cplx c : {cplx(2.0, 0.0), cplx(0.0, 1.0), cplx(-0.3, 0.4)}) {
        auto scaled = distorted;
        for (auto& v : scaled.values[0]) v *= c;
        EXPECT_NEAR(fidelity_correlation(scaled, in, 19.0), base, 1e-12);
    }
    EXPECT_LT(base, 1.0);
}

TEST(Evaluate, RejectsMismatchedSeries) {
    const auto [out, in] = delayed_pair(5.0, 1.0);
    auto other = out;
    other.modes = {{1, 0}};
    EXPECT_THROW((void)correlation_amplitude(other, in, 5.0), std::invalid_argument);
    other = out;
    other.dt *= 2.0;
    EXPECT_THROW((void)correlation_amplitude(other, in, 5.0), std::invalid_argument);
}
