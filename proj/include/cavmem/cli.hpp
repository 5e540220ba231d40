#pragma once

// Subcommand implementations behind tools/cavmem: run, sweep, design,
// capacity. Exit codes: 0 success, 1 configuration error, 2 numerical error.

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "cavmem/analytic.hpp"
#include "cavmem/config.hpp"
#include "cavmem/metrics.hpp"
#include "cavmem/micro.hpp"
#include "cavmem/protocol.hpp"

namespace cavmem::cli {

namespace fs = std::filesystem;
using config::json;

enum ExitCode : int { kOk = 0, kConfigError = 1, kNumericalError = 2 };

struct Overrides {
    std::optional<double> dt_ratio;
    std::optional<std::uint64_t> seed;
};

/// 12 significant digits, scientific.
inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.11e", v);
    return buf;
}

inline json load_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw config::ConfigError(path.string(), "cannot open config file");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw config::ConfigError(path.string(), e.what());
    }
}

inline void apply(config::RunConfig& c, const Overrides& o) {
    if (o.dt_ratio) {
        if (!(*o.dt_ratio > 0.0)) throw config::ConfigError("--dt-ratio", "must be positive");
        c.dt_ratio = *o.dt_ratio;
    }
    if (o.seed && c.micro) c.micro->seed = *o.seed;
}

/// Collective run or, for model "micro", the microscopic oracle with the same
/// grid and figures of merit.
inline protocol::SimOutput execute(const config::RunConfig& c) {
    const auto sys = c.system();
    const auto spec = c.pulse();
    if (c.model != "micro") return protocol::run_protocol(spec, sys, c.retrieval(), c.integrator());

    const auto mr = micro::run_micro(spec, sys, *c.micro, c.retrieval(), c.integrator());
    protocol::SimOutput o;
    const std::size_t n = mr.E_out.size() - 1;
    const double T = sys.sched.T;
    o.E_in = ModeSeries::zeros(sys.modes, -T, mr.E_out.dt, 2 * n + 1);
    o.E_out = ModeSeries::zeros(sys.modes, -T, mr.E_out.dt, 2 * n + 1);
    const auto drive = protocol::make_drive(spec, sys);
    for (std::size_t k = 0; k <= n; ++k) {
        o.E_in.values[0][k] = drive(o.E_in.time(k))[0];
        o.E_out.values[0][k] = mr.E_store.values[0][k];
        o.E_out.values[0][n + k] = mr.E_out.values[0][k];
    }
    const auto f = metrics::evaluate(o.E_out, o.E_in, T);
    o.N_in = f.N_in;
    o.N_out = f.N_out;
    o.eta = f.eta;
    o.Fprime = f.Fprime;
    o.F = f.F;
    o.tbar = f.tbar;
    o.flat_correlation = f.flat_correlation;
    o.storage_leakage = metrics::photon_number(mr.E_store, -T, 0.0).value;
    o.eta_per_mode = {f.eta};
    o.pulse_truncated = spec.energy_fraction(-T, 0.0) < 1.0 - protocol::kWindowEnergyTolerance;
    return o;
}

/// Columns: t_over_delta, then Re/Im of E_in per mode, then Re/Im of E_out per mode.
inline void write_timeseries(std::ostream& os, const protocol::SimOutput& o) {
    os << "t_over_delta";
    for (const auto& m : o.E_in.modes) os << ",Ein_" << m.label() << "_re,Ein_" << m.label() << "_im";
    for (const auto& m : o.E_out.modes) os << ",Eout_" << m.label() << "_re,Eout_" << m.label() << "_im";
    os << "\n";
    for (std::size_t k = 0; k < o.E_in.size(); ++k) {
        os << fmt(o.E_in.time(k));
        for (const auto& v : o.E_in.values) os << ',' << fmt(v[k].real()) << ',' << fmt(v[k].imag());
        for (const auto& v : o.E_out.values) os << ',' << fmt(v[k].real()) << ',' << fmt(v[k].imag());
        os << "\n";
    }
}

inline json summary_json(const config::RunConfig& c, const protocol::SimOutput& o) {
    json per_mode = json::object();
    for (std::size_t i = 0; i < o.eta_per_mode.size(); ++i) per_mode[o.E_out.modes[i].label()] = o.eta_per_mode[i];
    return {{"eta", o.eta},
            {"Fprime", o.Fprime},
            {"F", o.F},
            {"tbar_over_delta", o.tbar},
            {"storage_leakage", o.storage_leakage},
            {"N_in", o.N_in},
            {"N_out", o.N_out},
            {"eta_per_mode", per_mode},
            {"flat_correlation", o.flat_correlation},
            {"pulse_truncated", o.pulse_truncated},
            {"config", config::to_json(c)},
            {"code_version", config::kCodeVersion}};
}

inline void write_file(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << text;
}

template <class F>
int guarded(F&& body, std::ostream& err) {
    try {
        return body();
    } catch (const config::ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << "\n";
        return kNumericalError;
    } catch (const QuadratureError& e) {
        err << "numerical error: " << e.what() << "\n";
        return kNumericalError;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kNumericalError;
    }
}

inline int cmd_run(const fs::path& config_path, const fs::path& out_dir, const Overrides& ov = {},
                   std::ostream& err = std::cerr) {
    return guarded(
        [&] {
            auto c = config::parse_run(load_json(config_path));
            apply(c, ov);
            const auto o = execute(c);
            if (o.pulse_truncated) err << "warning: more than 1e-6 of the pulse energy lies outside [-T, 0]\n";
            fs::create_directories(out_dir);
            std::ostringstream ts;
            write_timeseries(ts, o);
            write_file(out_dir / "timeseries.csv", ts.str());
            write_file(out_dir / "summary.json", summary_json(c, o).dump(2) + "\n");
            return static_cast<int>(kOk);
        },
        err);
}

struct SweepRow {
    std::vector<double> point;
    double eta = 0.0, Fprime = 0.0, F = 0.0, tbar = 0.0;
    std::string error;
};

inline std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) {
        if (ch == '"') q += '"';
        q += ch == '\n' ? ' ' : ch;
    }
    return q + "\"";
}

/// Evaluate every grid point; rows come back in lexicographic grid order
/// whatever the worker count.
inline std::vector<SweepRow> run_sweep(const config::SweepConfig& s, unsigned workers, const Overrides& ov = {}) {
    const std::size_t n = config::sweep_size(s);
    std::vector<SweepRow> rows(n);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t k = next++; k < n; k = next++) {
            auto& row = rows[k];
            row.point = config::sweep_point(s, k);
            try {
                auto c = config::parse_run(config::sweep_patch(s, row.point));
                apply(c, ov);
                const auto o = execute(c);
                row.eta = o.eta;
                row.Fprime = o.Fprime;
                row.F = o.F;
                row.tbar = o.tbar;
            } catch (const std::exception& e) {
                row.error = e.what();
            }
        }
    };
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n)));
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < workers; ++i) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    return rows;
}

/// Columns: one per axis (axis name), then eta, Fprime, F, tbar_over_delta, error.
inline void write_sweep(std::ostream& os, const config::SweepConfig& s, const std::vector<SweepRow>& rows) {
    for (const auto& a : s.axes) os << csv_quote(a.name) << ',';
    os << "eta,Fprime,F,tbar_over_delta,error\n";
    for (const auto& r : rows) {
        for (double v : r.point) os << fmt(v) << ',';
        os << fmt(r.eta) << ',' << fmt(r.Fprime) << ',' << fmt(r.F) << ',' << fmt(r.tbar) << ',' << csv_quote(r.error)
           << "\n";
    }
}

inline int cmd_sweep(const fs::path& config_path, const fs::path& out_dir, unsigned workers, const Overrides& ov = {},
                     std::ostream& err = std::cerr) {
    return guarded(
        [&] {
            const auto s = config::parse_sweep(load_json(config_path));
            const auto rows = run_sweep(s, workers, ov);
            fs::create_directories(out_dir);
            std::ostringstream os;
            write_sweep(os, s, rows);
            write_file(out_dir / "sweep.csv", os.str());
            std::size_t failed = 0;
            for (const auto& r : rows) failed += r.error.empty() ? 0 : 1;
            if (failed) err << "warning: " << failed << " of " << rows.size() << " sweep points failed\n";
            return static_cast<int>(kOk);
        },
        err);
}

inline int cmd_design(const fs::path& config_path, const fs::path& out_dir, std::ostream& out = std::cout,
                      std::ostream& err = std::cerr) {
    return guarded(
        [&] {
            const auto d = config::parse_design(load_json(config_path));
            const auto r = analytic::design_point(d);
            const auto text = config::to_json(r, d).dump(2) + "\n";
            fs::create_directories(out_dir);
            write_file(out_dir / "design.json", text);
            out << text;
            if (!r.raman_valid) err << "warning: (Omega/Delta)^2 is not small; Raman regime questionable\n";
            if (!r.bad_cavity_valid) err << "warning: kappa*delta < 1; bad-cavity condition fails\n";
            return static_cast<int>(kOk);
        },
        err);
}

inline int cmd_capacity(const fs::path& config_path, const fs::path& out_dir, std::ostream& out = std::cout,
                        std::ostream& err = std::cerr) {
    return guarded(
        [&] {
            const auto c = config::parse_capacity(load_json(config_path));
            const auto r = analytic::capacity_estimate(c);
            const auto text = config::to_json(r, c).dump(2) + "\n";
            fs::create_directories(out_dir);
            write_file(out_dir / "capacity.json", text);
            out << text;
            return static_cast<int>(kOk);
        },
        err);
}

} // namespace cavmem::cli
