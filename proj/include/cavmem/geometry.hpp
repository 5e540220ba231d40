#pragma once

#include <cmath>
#include <compare>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace cavmem {

/// Transverse Hermite-Gaussian order (TEM_mn).
struct ModeIndex {
    int m = 0;
    int n = 0;

    auto operator<=>(const ModeIndex&) const = default;

    [[nodiscard]] int order() const { return m + n; }
    [[nodiscard]] std::string label() const { return "m" + std::to_string(m) + "_n" + std::to_string(n); }
};

/// Spin-wave label: transverse profile plus longitudinal index p.
struct SpinIndex {
    ModeIndex mode;
    int p = 0;

    auto operator<=>(const SpinIndex&) const = default;
};

/// Cavity/sample geometry. All lengths share one unit.
struct BeamGeometry {
    double w0 = 1.0;        ///< waist radius
    double lambda_s = 1.0;  ///< signal wavelength
    double Lz = 1.0;        ///< sample length
    double L = 1.0;         ///< cavity length
    double A = 1.0;         ///< mirror cross-section

    [[nodiscard]] double rayleigh_range() const { return std::numbers::pi * w0 * w0 / lambda_s; }
    [[nodiscard]] double wavenumber() const { return 2.0 * std::numbers::pi / lambda_s; }

    [[nodiscard]] double spot_size(double z) const {
        const double r = z / rayleigh_range();
        return w0 * std::sqrt(1.0 + r * r);
    }

    /// Wavefront radius R(z); infinite at the waist.
    [[nodiscard]] double curvature_radius(double z) const {
        if (z == 0.0) return std::numeric_limits<double>::infinity();
        const double r = rayleigh_range() / z;
        return z * (1.0 + r * r);
    }

    [[nodiscard]] double gouy(double z) const { return std::atan(z / rayleigh_range()); }

    void validate() const {
        if (!(w0 > 0) || !(lambda_s > 0) || !(Lz > 0) || !(L > 0) || !(A > 0))
            throw std::invalid_argument("BeamGeometry: all lengths must be positive");
        if (Lz > L * (1.0 + 1e-12))
            throw std::invalid_argument("BeamGeometry: sample length exceeds cavity length");
        if (!(Lz < 2.0 * rayleigh_range()))
            throw std::invalid_argument("BeamGeometry: sample must be shorter than the confocal parameter 2 zR");
    }

    /// Geometry from dimensionless ratios with Lz = 1.
    static BeamGeometry from_ratios(double w0_over_Lz, double Lz_over_zR, double L_over_Lz) {
        BeamGeometry g;
        g.Lz = 1.0;
        g.L = L_over_Lz;
        g.w0 = w0_over_Lz;
        const double zR = 1.0 / Lz_over_zR;
        g.lambda_s = std::numbers::pi * g.w0 * g.w0 / zR;
        // wide mirrors; only the ratio A/(λL) enters diffraction estimates
        g.A = 100.0 * g.w0 * g.w0;
        return g;
    }
};

} // namespace cavmem
