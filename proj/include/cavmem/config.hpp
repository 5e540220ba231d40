#pragma once

// JSON run/sweep/design/capacity configurations. Simulation configs are
// dimensionless in units of the switching time; design configs are SI.

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "cavmem/analytic.hpp"
#include "cavmem/dynamics.hpp"
#include "cavmem/micro.hpp"
#include "cavmem/protocol.hpp"

namespace cavmem::config {

using json = nlohmann::json;
using cplx = std::complex<double>;

inline constexpr const char* kCodeVersion = "1.0.0";

/// Invalid configuration; the message starts with the offending field path.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& field, const std::string& what)
        : std::runtime_error(field + ": " + what), field_(field) {}
    [[nodiscard]] const std::string& field() const { return field_; }

private:
    std::string field_;
};

namespace detail {

/// Field access with path-qualified diagnostics and unknown-key rejection.
class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_.empty() ? "/" : path_, "expected an object");
    }

    [[nodiscard]] std::string at(const std::string& key) const { return path_ + "/" + key; }
    [[nodiscard]] bool has(const std::string& key) const { return j_.contains(key); }

    const json& sub(const std::string& key) {
        seen_.insert(key);
        if (!j_.contains(key)) throw ConfigError(at(key), "required field is missing");
        return j_.at(key);
    }

    double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
        seen_.insert(key);
        if (!j_.contains(key)) {
            if (fallback) return *fallback;
            throw ConfigError(at(key), "required field is missing");
        }
        const auto& v = j_.at(key);
        if (!v.is_number()) throw ConfigError(at(key), "expected a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) throw ConfigError(at(key), "must be finite");
        return d;
    }

    long long integer(const std::string& key, std::optional<long long> fallback = std::nullopt) {
        seen_.insert(key);
        if (!j_.contains(key)) {
            if (fallback) return *fallback;
            throw ConfigError(at(key), "required field is missing");
        }
        const auto& v = j_.at(key);
        if (!v.is_number_integer()) throw ConfigError(at(key), "expected an integer");
        return v.get<long long>();
    }

    bool boolean(const std::string& key, bool fallback) {
        seen_.insert(key);
        if (!j_.contains(key)) return fallback;
        const auto& v = j_.at(key);
        if (!v.is_boolean()) throw ConfigError(at(key), "expected true or false");
        return v.get<bool>();
    }

    std::string choice(const std::string& key, const std::vector<std::string>& allowed, std::optional<std::string> fallback) {
        seen_.insert(key);
        if (!j_.contains(key)) {
            if (fallback) return *fallback;
            throw ConfigError(at(key), "required field is missing");
        }
        const auto& v = j_.at(key);
        if (!v.is_string()) throw ConfigError(at(key), "expected a string");
        const auto s = v.get<std::string>();
        for (const auto& a : allowed)
            if (s == a) return s;
        std::string list;
        for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
        throw ConfigError(at(key), "must be one of: " + list);
    }

    void ignore(const std::string& key) { seen_.insert(key); }

    void finish() const {
        for (const auto& [k, v] : j_.items())
            if (!seen_.count(k)) throw ConfigError(at(k), "unknown field");
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

inline void require(bool ok, const std::string& field, const std::string& what) {
    if (!ok) throw ConfigError(field, what);
}

} // namespace detail

struct ModeEntry {
    ModeIndex idx;
    double kappa_delta = 0.0;
    double detuning_delta = 0.0;
    cplx amplitude;

    bool operator==(const ModeEntry&) const = default;
};

struct RunConfig {
    std::string model = "simplified";  ///< simplified | full | micro
    std::string direction = "backward";
    double T_over_delta = 30.0;
    double L_over_Lz = 1.0;
    double theta0_deg = 90.0;
    double w0_over_Lz = 0.02 / std::numbers::pi;
    double Lz_over_zR = 0.2;
    double Gamma_delta = 0.0;
    double gammaR_delta = 0.0;
    std::vector<ModeEntry> modes;
    double fwhm_over_delta = 1.0;
    double center_over_delta = -15.0;
    double dt_ratio = 200.0;
    int p_pad = 8;
    std::optional<micro::MicroParams> micro;

    bool operator==(const RunConfig&) const = default;

    [[nodiscard]] protocol::Direction retrieval() const {
        return direction == "backward" ? protocol::Direction::backward : protocol::Direction::forward;
    }

    [[nodiscard]] dynamics::SystemConfig system() const {
        std::vector<ModeIndex> idx;
        std::vector<double> kap, shift;
        for (const auto& m : modes) {
            idx.push_back(m.idx);
            kap.push_back(m.kappa_delta);
            shift.push_back(m.detuning_delta);
        }
        return dynamics::SystemConfig::dimensionless(idx, kap, shift, Gamma_delta, gammaR_delta, T_over_delta,
                                                     theta0_deg * std::numbers::pi / 180.0,
                                                     model == "full" ? dynamics::ModelKind::full
                                                                     : dynamics::ModelKind::simplified,
                                                     w0_over_Lz, Lz_over_zR, L_over_Lz, p_pad);
    }

    [[nodiscard]] protocol::PulseSpec pulse() const {
        protocol::PulseSpec p;
        p.amplitudes.clear();
        for (const auto& m : modes)
            if (m.amplitude != cplx{}) p.amplitudes.emplace_back(m.idx, m.amplitude);
        p.fwhm = fwhm_over_delta;
        p.center = center_over_delta;
        return p;
    }

    [[nodiscard]] protocol::IntegratorOptions integrator() const { return {dt_ratio}; }
};

inline micro::MicroParams parse_micro(const json& j, const std::string& path) {
    detail::Reader r(j, path);
    micro::MicroParams m;
    m.n_atoms = static_cast<int>(r.integer("n_atoms", m.n_atoms));
    m.Delta = r.number("Delta_delta", m.Delta);
    m.Omega_over_Delta = r.number("Omega_over_Delta", m.Omega_over_Delta);
    m.gamma_P = r.number("gammaP_delta", m.gamma_P);
    m.gamma_S = r.number("gammaS_delta", m.gamma_S);
    m.transverse_box = r.number("transverse_box", m.transverse_box);
    m.light_shift_compensation = r.boolean("light_shift_compensation", m.light_shift_compensation);
    m.cavity_pull_compensation = r.boolean("cavity_pull_compensation", m.cavity_pull_compensation);
    m.stratified = r.boolean("stratified", m.stratified);
    m.dt_Delta = r.number("dt_Delta", m.dt_Delta);
    const long long seed = r.integer("seed", static_cast<long long>(m.seed));
    detail::require(seed >= 0, r.at("seed"), "must be >= 0");
    m.seed = static_cast<std::uint64_t>(seed);
    r.finish();
    detail::require(m.n_atoms >= 1, r.at("n_atoms"), "must be >= 1");
    detail::require(m.Delta != 0.0, r.at("Delta_delta"), "must be nonzero");
    detail::require(m.Omega_over_Delta > 0.0, r.at("Omega_over_Delta"), "must be positive");
    detail::require(m.gamma_P >= 0.0, r.at("gammaP_delta"), "must be >= 0");
    detail::require(m.gamma_S >= 0.0, r.at("gammaS_delta"), "must be >= 0");
    detail::require(m.transverse_box > 0.0, r.at("transverse_box"), "must be positive");
    detail::require(m.dt_Delta > 0.0, r.at("dt_Delta"), "must be positive");
    return m;
}

/// Parse and validate a run configuration. `sweep` (if present) is ignored
/// here; see parse_sweep.
inline RunConfig parse_run(const json& j) {
    detail::Reader r(j, "");
    RunConfig c;
    c.model = r.choice("model", {"simplified", "full", "micro"}, c.model);
    c.direction = r.choice("direction", {"backward", "forward"}, c.direction);
    c.T_over_delta = r.number("T_over_delta");
    c.L_over_Lz = r.number("L_over_Lz", c.L_over_Lz);
    c.theta0_deg = r.number("theta0_deg", c.theta0_deg);
    c.w0_over_Lz = r.number("w0_over_Lz", c.w0_over_Lz);
    c.Lz_over_zR = r.number("Lz_over_zR", c.Lz_over_zR);
    c.Gamma_delta = r.number("Gamma_delta");
    c.gammaR_delta = r.number("gammaR_delta", c.gammaR_delta);

    detail::require(c.T_over_delta > 0.0, r.at("T_over_delta"), "must be positive");
    detail::require(c.L_over_Lz >= 1.0, r.at("L_over_Lz"), "must be >= 1 (sample inside the cavity)");
    detail::require(c.theta0_deg > 0.0 && c.theta0_deg < 180.0, r.at("theta0_deg"), "must lie in (0, 180)");
    detail::require(c.w0_over_Lz > 0.0, r.at("w0_over_Lz"), "must be positive");
    detail::require(c.Lz_over_zR > 0.0 && c.Lz_over_zR < 2.0, r.at("Lz_over_zR"), "must lie in (0, 2)");
    detail::require(c.Gamma_delta >= 0.0, r.at("Gamma_delta"), "must be >= 0");
    detail::require(c.gammaR_delta >= 0.0, r.at("gammaR_delta"), "must be >= 0");

    const auto& modes = r.sub("modes");
    detail::require(modes.is_array() && !modes.empty(), "/modes", "expected a non-empty array");
    double weight = 0.0;
    bool any_amplitude = false;
    for (std::size_t i = 0; i < modes.size(); ++i) {
        const std::string path = "/modes/" + std::to_string(i);
        detail::Reader mr(modes[i], path);
        ModeEntry e;
        e.idx.m = static_cast<int>(mr.integer("m"));
        e.idx.n = static_cast<int>(mr.integer("n"));
        e.kappa_delta = mr.number("kappa_delta");
        e.detuning_delta = mr.number("detuning_delta", 0.0);
        if (mr.has("amplitude")) {
            const auto& a = mr.sub("amplitude");
            detail::require(a.is_array() && a.size() == 2 && a[0].is_number() && a[1].is_number(), mr.at("amplitude"),
                            "expected [re, im]");
            e.amplitude = {a[0].get<double>(), a[1].get<double>()};
            any_amplitude = true;
        }
        mr.finish();
        detail::require(e.idx.m >= 0, mr.at("m"), "must be >= 0");
        detail::require(e.idx.n >= 0, mr.at("n"), "must be >= 0");
        detail::require(e.kappa_delta > 0.0, mr.at("kappa_delta"), "must be positive");
        for (const auto& prev : c.modes) detail::require(!(prev.idx == e.idx), path, "duplicate mode " + e.idx.label());
        weight += std::norm(e.amplitude);
        c.modes.push_back(e);
    }
    // no amplitude anywhere: drive the first listed mode
    if (!any_amplitude) {
        c.modes.front().amplitude = 1.0;
        weight = 1.0;
    }
    detail::require(std::abs(weight - 1.0) <= 1e-9, "/modes", "amplitudes must satisfy sum |A|^2 = 1");

    {
        detail::Reader pr(r.sub("pulse"), "/pulse");
        c.fwhm_over_delta = pr.number("fwhm_over_delta");
        c.center_over_delta = pr.number("center_over_delta", -0.5 * c.T_over_delta);
        pr.finish();
        detail::require(c.fwhm_over_delta > 0.0, "/pulse/fwhm_over_delta", "must be positive");
        detail::require(c.center_over_delta >= -c.T_over_delta && c.center_over_delta <= 0.0,
                        "/pulse/center_over_delta", "must lie in [-T_over_delta, 0]");
    }
    if (r.has("integrator")) {
        detail::Reader ir(r.sub("integrator"), "/integrator");
        c.dt_ratio = ir.number("dt_ratio", c.dt_ratio);
        const long long pad = ir.integer("p_pad", c.p_pad);
        ir.finish();
        detail::require(c.dt_ratio > 0.0, "/integrator/dt_ratio", "must be positive");
        detail::require(pad >= 0 && pad <= 1000, "/integrator/p_pad", "must lie in [0, 1000]");
        c.p_pad = static_cast<int>(pad);
    }
    if (r.has("micro")) c.micro = parse_micro(r.sub("micro"), "/micro");
    if (c.model == "micro") {
        if (!c.micro) c.micro = micro::MicroParams{};
        detail::require(c.modes.size() == 1, "/modes", "the micro model supports exactly one mode");
    }
    r.ignore("sweep");
    r.finish();
    return c;
}

inline json to_json(const micro::MicroParams& m) {
    return {{"n_atoms", m.n_atoms},
            {"Delta_delta", m.Delta},
            {"Omega_over_Delta", m.Omega_over_Delta},
            {"gammaP_delta", m.gamma_P},
            {"gammaS_delta", m.gamma_S},
            {"transverse_box", m.transverse_box},
            {"light_shift_compensation", m.light_shift_compensation},
            {"cavity_pull_compensation", m.cavity_pull_compensation},
            {"stratified", m.stratified},
            {"dt_Delta", m.dt_Delta},
            {"seed", m.seed}};
}

/// Complete serialization; parse_run(to_json(c)) == c.
inline json to_json(const RunConfig& c) {
    json modes = json::array();
    for (const auto& m : c.modes)
        modes.push_back({{"m", m.idx.m},
                         {"n", m.idx.n},
                         {"kappa_delta", m.kappa_delta},
                         {"detuning_delta", m.detuning_delta},
                         {"amplitude", {m.amplitude.real(), m.amplitude.imag()}}});
    json j = {{"model", c.model},
              {"direction", c.direction},
              {"T_over_delta", c.T_over_delta},
              {"L_over_Lz", c.L_over_Lz},
              {"theta0_deg", c.theta0_deg},
              {"w0_over_Lz", c.w0_over_Lz},
              {"Lz_over_zR", c.Lz_over_zR},
              {"Gamma_delta", c.Gamma_delta},
              {"gammaR_delta", c.gammaR_delta},
              {"modes", modes},
              {"pulse", {{"fwhm_over_delta", c.fwhm_over_delta}, {"center_over_delta", c.center_over_delta}}},
              {"integrator", {{"dt_ratio", c.dt_ratio}, {"p_pad", c.p_pad}}}};
    if (c.micro) j["micro"] = to_json(*c.micro);
    return j;
}

struct SweepAxis {
    std::string name;
    std::vector<std::string> pointers;  ///< every pointer receives the same value
    std::vector<double> values;

    bool operator==(const SweepAxis&) const = default;
};

struct SweepConfig {
    json base;  ///< run config without the sweep block
    std::vector<SweepAxis> axes;
};

inline SweepConfig parse_sweep(const json& j) {
    if (!j.is_object()) throw ConfigError("/", "expected an object");
    if (!j.contains("sweep")) throw ConfigError("/sweep", "required field is missing");
    SweepConfig s;
    s.base = j;
    s.base.erase("sweep");
    (void)parse_run(s.base);  // the unswept base must itself be valid

    detail::Reader sr(j.at("sweep"), "/sweep");
    const auto& axes = sr.sub("axes");
    sr.finish();
    detail::require(axes.is_array() && !axes.empty(), "/sweep/axes", "expected a non-empty array");
    for (std::size_t i = 0; i < axes.size(); ++i) {
        const std::string path = "/sweep/axes/" + std::to_string(i);
        detail::Reader ar(axes[i], path);
        SweepAxis a;
        const auto& ptrs = ar.sub("pointers");
        detail::require(ptrs.is_array() && !ptrs.empty(), ar.at("pointers"), "expected a non-empty array of JSON pointers");
        for (const auto& p : ptrs) {
            detail::require(p.is_string(), ar.at("pointers"), "expected strings");
            const auto ps = p.get<std::string>();
            try {
                const json::json_pointer jp(ps);
                detail::require(s.base.contains(jp), ar.at("pointers"), "pointer " + ps + " does not name an existing field");
            } catch (const json::parse_error&) {
                throw ConfigError(ar.at("pointers"), "malformed JSON pointer " + ps);
            }
            a.pointers.push_back(ps);
        }
        const auto& vals = ar.sub("values");
        detail::require(vals.is_array() && !vals.empty(), ar.at("values"), "expected a non-empty array of numbers");
        for (const auto& v : vals) {
            detail::require(v.is_number(), ar.at("values"), "expected numbers");
            a.values.push_back(v.get<double>());
        }
        if (ar.has("name")) {
            const auto& n = ar.sub("name");
            detail::require(n.is_string(), ar.at("name"), "expected a string");
            a.name = n.get<std::string>();
        } else {
            a.name = a.pointers.front();
        }
        ar.finish();
        s.axes.push_back(std::move(a));
    }
    return s;
}

/// Grid point k in lexicographic order (first axis outermost).
inline std::vector<double> sweep_point(const SweepConfig& s, std::size_t k) {
    std::vector<double> v(s.axes.size());
    for (std::size_t i = s.axes.size(); i-- > 0;) {
        const auto n = s.axes[i].values.size();
        v[i] = s.axes[i].values[k % n];
        k /= n;
    }
    return v;
}

inline std::size_t sweep_size(const SweepConfig& s) {
    std::size_t n = 1;
    for (const auto& a : s.axes) n *= a.values.size();
    return n;
}

inline json sweep_patch(const SweepConfig& s, const std::vector<double>& point) {
    json j = s.base;
    for (std::size_t i = 0; i < s.axes.size(); ++i)
        for (const auto& p : s.axes[i].pointers) {
            auto& slot = j[json::json_pointer(p)];
            if (slot.is_number_integer() && point[i] == std::floor(point[i]))
                slot = static_cast<long long>(point[i]);
            else
                slot = point[i];
        }
    return j;
}

inline analytic::DesignPoint parse_design(const json& j) {
    detail::Reader r(j, "");
    analytic::DesignPoint d;
    d.oscillator_strength = r.number("oscillator_strength");
    d.ion_density = r.number("ion_density_per_cm3") * 1e6;
    d.lambda = r.number("lambda_m");
    d.Delta = 2.0 * std::numbers::pi * r.number("Delta_over_2pi_Hz");
    d.Omega_over_Delta_sq = r.number("Omega_over_Delta_sq");
    d.kappa = r.number("kappa_per_s");
    d.delta = r.number("delta_s");
    d.Lz = r.number("Lz_m");
    d.L = r.number("L_m", d.Lz);
    d.beam_diameter = r.number("beam_diameter_m");
    d.gamma_S = r.number("gammaS_per_s", 0.0);
    d.gamma_P = r.number("gammaP_per_s", 0.0);
    d.refractive_index = r.number("refractive_index", 1.0);
    if (r.has("g2N_per_s2")) d.g2N = r.number("g2N_per_s2");
    r.finish();
    const char* positive[] = {"oscillator_strength", "ion_density_per_cm3", "lambda_m", "Delta_over_2pi_Hz",
                              "Omega_over_Delta_sq", "kappa_per_s", "delta_s", "Lz_m", "L_m",
                              "beam_diameter_m", "refractive_index"};
    const double values[] = {d.oscillator_strength, d.ion_density, d.lambda, d.Delta, d.Omega_over_Delta_sq,
                             d.kappa, d.delta, d.Lz, d.L, d.beam_diameter, d.refractive_index};
    for (std::size_t i = 0; i < std::size(values); ++i)
        detail::require(values[i] > 0.0, std::string("/") + positive[i], "must be positive");
    detail::require(d.gamma_S >= 0.0, "/gammaS_per_s", "must be >= 0");
    detail::require(d.gamma_P >= 0.0, "/gammaP_per_s", "must be >= 0");
    if (d.g2N) detail::require(*d.g2N > 0.0, "/g2N_per_s2", "must be positive");
    return d;
}

inline json to_json(const analytic::DesignReport& r, const analytic::DesignPoint& d) {
    return {{"optical_angular_frequency_rad_per_s", r.omega},
            {"dipole_moment_C_m", r.dipole},
            {"dipole_conversion", "d^2 = 3 hbar e^2 f / (2 m_e omega), local-field factor = refractive_index"},
            {"g2N_from_oscillator_strength_per_s2", r.g2N_from_f},
            {"g2N_used_per_s2", r.g2N},
            {"g2N_source", d.g2N ? "config override" : "oscillator strength"},
            {"gR2N_per_s2", r.gR2N},
            {"Gamma_per_s", r.Gamma},
            {"kappa_per_s", d.kappa},
            {"Gamma_over_kappa", r.impedance_ratio},
            {"Omega_rad_per_s", r.Omega},
            {"Omega_over_2pi_Hz", r.Omega_over_2pi},
            {"control_field_amplitude_V_per_m", r.E0},
            {"control_intensity_W_per_m2", r.intensity},
            {"control_intensity_W_per_cm2", r.intensity_W_cm2},
            {"control_power_W", r.power},
            {"power_convention", "Gaussian beam, P = I pi D^2 / 8 with D the 1/e^2 intensity diameter"},
            {"mirror_transmittance_traveling_wave", r.transmittance_traveling},
            {"mirror_transmittance_standing_wave", r.transmittance_standing},
            {"transmittance_convention", "T = 2 kappa L / c (traveling wave), 4 kappa L / c (standing wave)"},
            {"gammaR_per_s", r.gammaR},
            {"kappa_delta", r.kappa_delta},
            {"raman_regime_valid", r.raman_valid},
            {"bad_cavity_valid", r.bad_cavity_valid}};
}

inline analytic::CapacityInput parse_capacity(const json& j) {
    detail::Reader r(j, "");
    analytic::CapacityInput c;
    c.fresnel_number = r.number("fresnel_number");
    c.mirror_transmittance = r.number("mirror_transmittance");
    c.loss_budget = r.number("loss_budget");
    c.w0_over_Lz = r.number("w0_over_Lz");
    c.T_over_delta_per_pulse = r.number("T_over_delta_per_pulse");
    c.margin = r.number("margin", c.margin);
    c.lambda_c_over_Lz = r.number("lambda_c_over_Lz");
    r.finish();
    detail::require(c.fresnel_number > 0.0, "/fresnel_number", "must be positive");
    detail::require(c.mirror_transmittance > 0.0 && c.mirror_transmittance < 1.0, "/mirror_transmittance",
                    "must lie in (0, 1)");
    detail::require(c.loss_budget > 0.0, "/loss_budget", "must be positive");
    detail::require(c.w0_over_Lz > 0.0, "/w0_over_Lz", "must be positive");
    detail::require(c.T_over_delta_per_pulse > 0.0, "/T_over_delta_per_pulse", "must be positive");
    detail::require(c.margin > 0.0, "/margin", "must be positive");
    detail::require(c.lambda_c_over_Lz > 0.0, "/lambda_c_over_Lz", "must be positive");
    return c;
}

inline json to_json(const analytic::CapacityReport& r, const analytic::CapacityInput& in) {
    return {{"max_index", r.max_index},
            {"n_transverse_pairs", r.n_transverse},
            {"n_transverse_square", r.n_transverse_square},
            {"theta0_min_deg", r.theta_min_deg},
            {"theta0_max_deg", r.theta_max_deg},
            {"rotation_per_pulse_rad", r.scan_per_pulse},
            {"n_pulses", r.n_pulses},
            {"n_pulses_exact", r.n_pulses_exact},
            {"loss_budget", in.loss_budget},
            {"loss_budget_over_transmittance", in.loss_budget / in.mirror_transmittance},
            {"note", r.note}};
}

} // namespace cavmem::config
