#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "cavmem/control.hpp"
#include "cavmem/hg_modes.hpp"
#include "support.hpp"

using namespace cavmem;
using testing_support::axis_closed_form;
using testing_support::dense_overlap;

namespace {
BeamGeometry geom(double Lz_over_zR = 0.2) { return BeamGeometry::from_ratios(0.02 / std::numbers::pi, Lz_over_zR, 1.0); }

/// (1/A)∬ f over [−4w0, 4w0]² by dense trapezoid.
template <class F>
cplx plane_integral(F f, const BeamGeometry& g, double z, int n = 601) {
    const double R = 4.0 * g.w0, h = 2.0 * R / (n - 1);
    cplx s = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double w = ((i == 0 || i == n - 1) ? 0.5 : 1.0) * ((j == 0 || j == n - 1) ? 0.5 : 1.0);
            s += w * f(-R + i * h, -R + j * h, z);
        }
    return s * h * h / g.A;
}
} // namespace

TEST(Sinc, ConventionAndSeriesBranch) {
    EXPECT_EQ(modes::sinc(0.0), 1.0);
    EXPECT_NEAR(modes::sinc(std::numbers::pi), 0.0, 1e-16);
    for (double x : {1e-6, 5e-5, 9.9e-5, 1.01e-4}) EXPECT_NEAR(modes::sinc(x), std::sin(x) / x, 1e-15);
}

TEST(EvalMode, OddModeVanishesOnAxis) {
    const auto g = geom();
    EXPECT_EQ(std::abs(modes::eval_mode({1, 0}, 0.0, 0.0, 0.0, g)), 0.0);
}

TEST(EvalMode, NormalizedInEveryPlane) {
    const auto g = geom();
    for (double z : {0.0, 0.3, -0.5}) {
        const auto v = plane_integral([&](double x, double y, double zz) { return std::norm(modes::eval_mode({0, 0}, x, y, zz, g)); }, g, z);
        EXPECT_NEAR(v.real(), 1.0, 1e-6) << "z=" << z;
    }
    const auto v21 = plane_integral([&](double x, double y, double z) { return std::norm(modes::eval_mode({2, 1}, x, y, z, g)); }, g, 0.0);
    EXPECT_NEAR(v21.real(), 1.0, 1e-6);
}

TEST(EvalMode, HermiteOrthogonality) {
    const auto g = geom();
    const auto v = plane_integral(
        [&](double x, double y, double z) {
            return std::conj(modes::eval_mode({0, 0}, x, y, z, g)) * modes::eval_mode({2, 0}, x, y, z, g);
        },
        g, 0.0);
    EXPECT_LT(std::abs(v), 1e-8);
}

TEST(EvalMode, FiniteForHighOrders) {
    const auto g = geom();
    const auto v = modes::eval_mode({60, 60}, 3.0 * g.w0, -2.0 * g.w0, 0.1, g);
    EXPECT_TRUE(std::isfinite(v.real()) && std::isfinite(v.imag()));
}

TEST(TransverseOverlap, IdentityAtZeroGrating) {
    const auto g = geom();
    for (int am = 0; am <= 3; ++am)
        for (int an = 0; an <= 2; ++an)
            for (int bm = 0; bm <= 3; ++bm)
                for (int bn = 0; bn <= 2; ++bn) {
                    const auto v = modes::transverse_overlap(0.0, {am, an}, {bm, bn}, g);
                    EXPECT_NEAR(std::abs(v - cplx(am == bm && an == bn ? 1.0 : 0.0)), 0.0, 1e-6);
                }
}

TEST(TransverseOverlap, MatchesDenseQuadratureOracle) {
    const auto g = geom();
    const double q = 0.2 / g.w0;
    const auto v = modes::transverse_overlap(q, {0, 0}, {1, 0}, g);
    const auto oracle = dense_overlap(q, {0, 0}, {1, 0}, g);
    EXPECT_NEAR(std::abs(v - oracle), 0.0, 1e-8);
    EXPECT_NEAR(v.real(), 0.0, 1e-12);
    EXPECT_NEAR(v.imag(), 0.0995012479, 1e-9);
    // first-order expansion value (sign per the e^{+iqx} grating)
    EXPECT_NEAR(std::abs(v - cplx(0.0, 0.1)), 0.0, 0.2 * 0.2);
}

TEST(TransverseOverlap, MatchesClosedFormForLowOrders) {
    const auto g = geom();
    for (double qw0 : {-1.3, 0.05, 0.7, 2.5}) {
        const double q = qw0 / g.w0;
        for (int j = 0; j <= 2; ++j)
            for (int k = 0; k <= 2; ++k) {
                const auto v = modes::transverse_overlap(q, {j, 1}, {k, 1}, g);
                EXPECT_NEAR(std::abs(v - axis_closed_form(qw0, j, k)), 0.0, 1e-12) << qw0 << " " << j << k;
            }
    }
}

TEST(TransverseOverlap, Hermiticity) {
    const auto g = geom();
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> qd(-5.0, 5.0);
    std::uniform_int_distribution<int> id(0, 5);
    for (int trial = 0; trial < 40; ++trial) {
        const double q = qd(rng) / g.w0;
        const ModeIndex a{id(rng), id(rng)}, b{id(rng), id(rng)};
        const auto l = modes::transverse_overlap(q, a, b, g);
        const auto r = std::conj(modes::transverse_overlap(-q, b, a, g));
        EXPECT_LE(std::abs(l - r), 1e-12);
    }
}

TEST(TransverseOverlap, UnitarityBound) {
    const auto g = geom();
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> qd(-20.0, 20.0);
    std::uniform_int_distribution<int> id(0, 8);
    for (int trial = 0; trial < 60; ++trial) {
        const auto v = modes::transverse_overlap(qd(rng) / g.w0, {id(rng), id(rng)}, {id(rng), id(rng)}, g);
        EXPECT_LE(std::abs(v), 1.0 + 1e-6);
    }
}

TEST(TransverseOverlap, FirstOrderLadderStructure) {
    const auto g = geom();
    double worst = 0.0;
    for (double qw0 : {0.01, 0.03, 0.05}) {
        const double q = qw0 / g.w0;
        for (int m = 0; m <= 5; ++m)
            for (int mp = 0; mp <= 5; ++mp)
                for (int n = 0; n <= 1; ++n) {
                    const auto v = modes::transverse_overlap(q, {m, n}, {mp, n}, g);
                    cplx expect = m == mp ? 1.0 : 0.0;
                    if (mp == m + 1) expect = cplx(0.0, modes::alpha_pm(q, g.w0, m, +1));
                    if (mp == m - 1) expect = cplx(0.0, modes::alpha_pm(q, g.w0, m, -1));
                    worst = std::max(worst, std::abs(v - expect) / (qw0 * qw0));
                }
    }
    EXPECT_LE(worst, 2.0);
}

TEST(TransverseOverlap, RejectsUnresolvedGrating) {
    const auto g = geom();
    EXPECT_THROW((void)modes::transverse_overlap(60.0 / g.w0, {0, 0}, {0, 0}, g), QuadratureError);
}

TEST(AlphaPm, Values) {
    EXPECT_EQ(modes::alpha_pm(0.0, 1.0, 3, +1), 0.0);
    EXPECT_EQ(modes::alpha_pm(0.0, 1.0, 3, -1), 0.0);
    EXPECT_NEAR(modes::alpha_pm(0.2, 1.0, 0, +1), 0.1, 1e-15);
    EXPECT_EQ(modes::alpha_pm(0.2, 1.0, 0, -1), 0.0);
    EXPECT_NEAR(modes::alpha_pm(0.2, 1.0, 3, -1), 0.1 * std::sqrt(3.0), 1e-15);
    EXPECT_THROW((void)modes::alpha_pm(0.2, 1.0, -1, 1), std::invalid_argument);
}

namespace {
control::RotationSchedule schedule(double theta0, double T = 5.0) {
    return control::RotationSchedule::for_switching_time(theta0, T, 1.0, 1.0, 1e-3);
}
} // namespace

TEST(CouplingFactorized, RephasingCenterAndZero) {
    const auto g = geom();
    const auto s = schedule(std::numbers::pi / 2);
    for (int p : {0, 2, 4}) {
        const double tp = p * 1.0;
        EXPECT_NEAR(std::abs(modes::coupling_B_factorized(-tp, {0, 0}, {{0, 0}, p}, s, g) - 1.0), 0.0, 1e-12);
        EXPECT_NEAR(std::abs(modes::coupling_B_factorized(1.0 - tp, {0, 0}, {{0, 0}, p}, s, g)), 0.0, 1e-12);
    }
}

TEST(CouplingNumeric, ZeroGratingIsNearlyOne) {
    const auto g = geom(0.05);
    const auto s = schedule(std::numbers::pi / 2);
    const auto v = modes::coupling_B_numeric(0.0, {0, 0}, {{0, 0}, 0}, s, g);
    EXPECT_NEAR(std::abs(v - 1.0), 0.0, 1e-3);
}

TEST(CouplingNumeric, LongitudinalSincAtOneSpinMode) {
    // p = L/Lz puts the sinc at its first zero
    const auto g = geom(0.2);
    const auto s = schedule(std::numbers::pi / 2);
    const auto v = modes::coupling_B_numeric(0.0, {0, 0}, {{0, 0}, 1}, s, g);
    EXPECT_NEAR(std::abs(v - modes::sinc(std::numbers::pi)), 0.0, 1e-3);
}

TEST(CouplingNumeric, LadderFirstOrder) {
    // q_x w0 = 0.2 with the sinc factor at its peak
    const auto g = geom(0.1);
    const double theta0 = std::atan(0.04 * 2.0 / 0.2);  // q_x w0 = 0.04 cotθ0 |t_eff| = 0.2 at t = -2
    const auto s = schedule(theta0);
    const double t = -2.0;
    ASSERT_NEAR(std::abs(control::q_transverse(t, s)) * g.w0, 0.2, 1e-9);
    const int p = 2;
    const double tg = control::rephasing_offsets(p, {0, 0}, {1, 0}, 1.0, g).t_gouy;
    const auto v = modes::coupling_B_numeric(t - tg, {0, 0}, {{1, 0}, p}, s, g);
    const double qw0 = control::q_transverse(t - tg, s) * g.w0;
    EXPECT_NEAR(std::abs(v - cplx(0.0, 0.5 * qw0)), 0.0, qw0 * qw0 + 1e-3);
}

TEST(CouplingNumeric, AgreesWithFactorizedOnRandomTuples) {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    std::uniform_int_distribution<int> md(0, 2);
    for (int trial = 0; trial < 6; ++trial) {
        const auto g = geom(0.05 + 0.15 * ud(rng));
        const double theta0 = 0.3 + (std::numbers::pi - 0.6) * ud(rng);
        const auto s = schedule(theta0);
        const double cot = std::abs(1.0 / std::tan(theta0));
        const double tmax = std::min(5.0, 1.0 / (0.04 * cot + 1e-12));
        const double t = -tmax * ud(rng);
        const ModeIndex a{md(rng), md(rng)}, b{md(rng), md(rng)};
        const int p = static_cast<int>(std::lround(-t)) + (trial % 3) - 1;
        const auto f = modes::coupling_B_factorized(t, a, {b, p}, s, g);
        const auto nmr = modes::coupling_B_numeric(t, a, {b, p}, s, g);
        EXPECT_LE(std::abs(f - nmr), 1e-3) << "trial " << trial;
    }
}
