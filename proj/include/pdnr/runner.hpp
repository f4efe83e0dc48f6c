#pragma once

#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pdnr/config.hpp"
#include "pdnr/io.hpp"
#include "pdnr/master.hpp"
#include "pdnr/model.hpp"
#include "pdnr/qsd.hpp"
#include "pdnr/semiclassics.hpp"
#include "pdnr/wigner.hpp"

namespace pdnr {

inline constexpr const char* kVersion = "pdnr 0.1.0";

struct RunFlags {
    std::string out_dir = ".";
    bool golden = false;          // 17 significant digits instead of 9
    bool json_format = false;     // additionally emit JSON mirrors
    bool strobe = false;          // semiclassical: emit stroboscopic point cloud
    std::optional<std::uint64_t> seed_override;
};

namespace detail {

inline void prepare_out_dir(const RunConfig& cfg, const RunFlags& flags) {
    std::filesystem::create_directories(flags.out_dir);
    write_text_file(flags.out_dir + "/config.echo.txt", config_to_text(cfg));
    write_text_file(flags.out_dir + "/version.txt", std::string(kVersion) + "\n");
}

inline int digits(const RunFlags& flags) { return flags.golden ? 17 : 9; }

}  // namespace detail

// Time series of <n>(t) plus, for qsd, its standard error.
struct EvolveSeries {
    std::vector<double> times;
    std::vector<double> mean_n;
    std::vector<double> stderr_n;  // empty for master/semiclassical
};

inline EvolveSeries compute_evolve_series(const RunConfig& cfg) {
    cfg.validate();
    const ModelParams p = cfg.model();
    const std::vector<double> grid = cfg.sample_grid();
    EvolveSeries s;
    if (cfg.method == Method::kMaster) {
        EvolveOptions opts;
        opts.step = cfg.resolved_step();
        opts.store_states = false;
        const EvolutionResult r = evolve_master(pure_density(vacuum_state(p.dim)), grid, p, opts);
        s.times = r.times;
        s.mean_n = r.mean_n;
    } else if (cfg.method == Method::kQsd) {
        QsdConfig qc;
        qc.n_traj = cfg.n_traj;
        qc.step = cfg.resolved_step();
        qc.seed = cfg.seed;
        qc.sample_times = grid;
        qc.density_times = std::vector<double>{};  // none
        const TrajectoryEnsembleResult r = run_ensemble(vacuum_state(p.dim), qc, p);
        s.times = r.sample_times;
        s.mean_n = r.mean_n;
        s.stderr_n = r.stderr_n;
    } else {
        const auto trace =
            evolve_classical(Complex{cfg.alpha0_re, cfg.alpha0_im}, grid, p, cfg.resolved_step());
        s.times = grid;
        s.mean_n.reserve(trace.size());
        for (Complex a : trace) s.mean_n.push_back(std::norm(a));
    }
    return s;
}

inline std::string evolve_series_csv(const EvolveSeries& s, int digits) {
    std::ostringstream out;
    out << "t,mean_n,stderr_n\n";
    for (std::size_t i = 0; i < s.times.size(); ++i) {
        out << format_float(s.times[i], digits) << ',' << format_float(s.mean_n[i], digits)
            << ',';
        if (!s.stderr_n.empty()) out << format_float(s.stderr_n[i], digits);
        out << "\n";
    }
    return out.str();
}

inline void cmd_evolve(RunConfig cfg, const RunFlags& flags) {
    if (flags.seed_override) cfg.seed = *flags.seed_override;
    cfg.validate();
    detail::prepare_out_dir(cfg, flags);
    const EvolveSeries s = compute_evolve_series(cfg);
    write_text_file(flags.out_dir + "/evolve.csv", evolve_series_csv(s, detail::digits(flags)));
    if (flags.json_format) {
        nlohmann::json j;
        j["t"] = s.times;
        j["mean_n"] = s.mean_n;
        if (!s.stderr_n.empty()) j["stderr_n"] = s.stderr_n;
        write_text_file(flags.out_dir + "/evolve.json", j.dump(2) + "\n");
    }
}

// Index of the requested instant within the post-transient window (the last
// full pulse period of the simulated window).
inline std::size_t resolve_instant_index(const RunConfig& cfg, const EvolveSeries& s) {
    if (cfg.instant == Instant::kAtTime) {
        const double t = cfg.instant_time;
        if (t < s.times.front() - 1e-9 || t > s.times.back() + 1e-9)
            throw config_error("instant_time outside the simulated window");
        std::size_t best = 0;
        for (std::size_t i = 1; i < s.times.size(); ++i)
            if (std::abs(s.times[i] - t) < std::abs(s.times[best] - t)) best = i;
        return best;
    }
    if (!cfg.pulsed)
        throw config_error("instant selector '" + std::string(instant_name(cfg.instant)) +
                           "' requires pulsed drive (use at_time for cw)");
    const double t_lo = s.times.back() - cfg.pulse_separation;
    std::size_t lo = 0;
    while (lo < s.times.size() && s.times[lo] < t_lo - 1e-9) ++lo;
    std::size_t i_min = lo, i_max = lo;
    for (std::size_t i = lo; i < s.times.size(); ++i) {
        if (s.mean_n[i] < s.mean_n[i_min]) i_min = i;
        if (s.mean_n[i] > s.mean_n[i_max]) i_max = i;
    }
    switch (cfg.instant) {
        case Instant::kAtMinN: return i_min;
        case Instant::kAtMaxN: return i_max;
        case Instant::kBetween: return (i_min + i_max) / 2;
        default: break;
    }
    throw std::logic_error("resolve_instant_index: unreachable");
}

// Density at the chosen instant, by the configured method.
inline Density density_at_instant(const RunConfig& cfg, double t_star) {
    const ModelParams p = cfg.model();
    if (cfg.method == Method::kMaster) {
        EvolveOptions opts;
        opts.step = cfg.resolved_step();
        opts.store_states = true;
        std::vector<double> grid;
        if (t_star > 0.0) grid = {0.0, t_star};
        else grid = {0.0};
        const EvolutionResult r = evolve_master(pure_density(vacuum_state(p.dim)), grid, p, opts);
        return r.states.back();
    }
    if (cfg.method == Method::kQsd) {
        QsdConfig qc;
        qc.n_traj = cfg.n_traj;
        qc.step = cfg.resolved_step();
        qc.seed = cfg.seed;
        if (t_star > 0.0) qc.sample_times = {0.0, t_star};
        else qc.sample_times = {0.0};
        qc.density_times = std::vector<double>{t_star};
        const TrajectoryEnsembleResult r = run_ensemble(vacuum_state(p.dim), qc, p);
        return r.density_estimates.back();
    }
    throw config_error("wigner requires method master or qsd");
}

struct WignerRunResult {
    EvolveSeries series;
    double t_star = 0.0;
    WignerGrid grid;
    HumpReport humps;
    double defect = 0.0;
    double norm = 0.0;
    GridMoments moments;
};

inline WignerRunResult compute_wigner_run(const RunConfig& cfg) {
    cfg.validate();
    WignerRunResult out;
    out.series = compute_evolve_series(cfg);
    const std::size_t idx = resolve_instant_index(cfg, out.series);
    out.t_star = out.series.times[idx];
    const Density rho = density_at_instant(cfg, out.t_star);
    GridSpec spec;
    spec.span = cfg.grid_span;
    spec.points = cfg.grid_points;
    out.grid = wigner_from_density(rho, spec, out.t_star, params_hash(cfg.model()));
    out.humps = find_humps(out.grid, cfg.hump_threshold);
    out.defect = symmetry_defect(out.grid);
    out.norm = normalization(out.grid);
    out.moments = grid_moments(out.grid);
    return out;
}

inline nlohmann::json wigner_summary_json(const WignerRunResult& r) {
    nlohmann::json j;
    j["time"] = r.t_star;
    j["params_hash"] = hex64(r.grid.params_hash);
    j["symmetry_defect"] = r.defect;
    j["normalization"] = r.norm;
    j["max_imag_residue"] = r.grid.max_imag_residue;
    j["humps"] = nlohmann::json::array();
    for (const Hump& h : r.humps.humps)
        j["humps"].push_back({{"x", h.x}, {"y", h.y}, {"w", h.w}, {"r", h.r}, {"theta", h.theta}});
    j["phase_differences"] = r.humps.phase_differences;
    if (r.humps.humps.size() == 2) {
        j["two_hump_phase_difference"] = r.humps.two_hump_phase_difference;
        j["two_hump_height_ratio"] = r.humps.two_hump_height_ratio;
    }
    j["moments"] = {{"mean_x", r.moments.mean_x},
                    {"mean_y", r.moments.mean_y},
                    {"var_x", r.moments.var_x},
                    {"var_y", r.moments.var_y},
                    {"cov_xy", r.moments.cov_xy},
                    {"principal_var_min", r.moments.principal_var_min},
                    {"principal_var_max", r.moments.principal_var_max}};
    return j;
}

inline void cmd_wigner(RunConfig cfg, const RunFlags& flags) {
    if (flags.seed_override) cfg.seed = *flags.seed_override;
    cfg.validate();
    detail::prepare_out_dir(cfg, flags);
    const WignerRunResult r = compute_wigner_run(cfg);
    const int d = detail::digits(flags);
    write_text_file(flags.out_dir + "/evolve.csv", evolve_series_csv(r.series, d));
    write_text_file(flags.out_dir + "/wigner_grid.txt", grid_to_text(r.grid, d));
    write_text_file(flags.out_dir + "/wigner_grid.csv", grid_to_csv(r.grid, d));
    write_text_file(flags.out_dir + "/wigner_summary.json", wigner_summary_json(r).dump(2) + "\n");
}

inline std::string steady_state_csv(const SteadyStateResult& r, double J, int digits) {
    std::ostringstream out;
    out << "# below_threshold = " << (r.below_threshold ? "true" : "false") << "\n";
    out << "# inconsistent = " << (r.inconsistent ? "true" : "false") << "\n";
    out << "# verified_solutions = " << r.solutions.size() << "\n";
    out << "J,branch,n,phi1,phi2,residual1,residual2,closed_form_n,matches_closed_form\n";
    for (const SteadyStateSolution& s : r.solutions) {
        out << format_float(J, digits) << ',' << s.branch << ',' << format_float(s.n, digits)
            << ',' << format_float(s.phases[0], digits) << ','
            << format_float(s.phases[1], digits) << ',' << format_float(s.residuals[0], digits)
            << ',' << format_float(s.residuals[1], digits) << ','
            << format_float(s.paper_formula_n, digits) << ','
            << (s.matches_closed_form ? 1 : 0) << "\n";
    }
    return out.str();
}

inline void cmd_semiclassical(RunConfig cfg, const RunFlags& flags) {
    if (flags.seed_override) cfg.seed = *flags.seed_override;
    cfg.validate();
    detail::prepare_out_dir(cfg, flags);
    const ModelParams p = cfg.model();
    const int d = detail::digits(flags);

    if (!cfg.pulsed) {
        const SteadyStateResult r = steady_states(p);
        write_text_file(flags.out_dir + "/steady_states.csv",
                        steady_state_csv(r, p.intensity, d));
        if (flags.json_format) {
            nlohmann::json j;
            j["below_threshold"] = r.below_threshold;
            j["inconsistent"] = r.inconsistent;
            j["threshold_J"] = threshold_J(p);
            j["solutions"] = nlohmann::json::array();
            for (const SteadyStateSolution& s : r.solutions)
                j["solutions"].push_back({{"n", s.n},
                                          {"J", s.J},
                                          {"branch", s.branch},
                                          {"phi1", s.phases[0]},
                                          {"phi2", s.phases[1]},
                                          {"residual1", s.residuals[0]},
                                          {"residual2", s.residuals[1]},
                                          {"closed_form_n", s.paper_formula_n},
                                          {"matches_closed_form", s.matches_closed_form}});
            write_text_file(flags.out_dir + "/steady_states.json", j.dump(2) + "\n");
        }
    } else {
        // Pulsed drive has no cw steady states; emit the header-only table so
        // downstream tooling sees a consistent schema.
        std::ostringstream out;
        out << "# below_threshold = false\n# inconsistent = false\n# verified_solutions = 0\n";
        out << "# pulsed drive: steady-state analysis requires cw\n";
        out << "J,branch,n,phi1,phi2,residual1,residual2,closed_form_n,matches_closed_form\n";
        write_text_file(flags.out_dir + "/steady_states.csv", out.str());
    }

    if (flags.strobe) {
        const auto points = stroboscopic_map(Complex{cfg.alpha0_re, cfg.alpha0_im}, p,
                                             cfg.strobe_periods);
        std::ostringstream out;
        out << "k,t,alpha_re,alpha_im,n\n";
        for (std::size_t k = 0; k < points.size(); ++k) {
            const double t = cfg.pulse_t0 + static_cast<double>(k + 1) * cfg.pulse_separation;
            out << (k + 1) << ',' << format_float(t, d) << ','
                << format_float(points[k].real(), d) << ',' << format_float(points[k].imag(), d)
                << ',' << format_float(std::norm(points[k]), d) << "\n";
        }
        write_text_file(flags.out_dir + "/strobe.csv", out.str());
    }
}

inline std::string classify_report(const RunConfig& cfg) {
    const RegimeReport r = classify_regime(cfg.model());
    std::ostringstream out;
    out << "regime: " << regime_name(r.label) << "\n";
    if (r.boundary_warning) out << "warning: delta = 0 lies on the regime boundary\n";
    out << "delta = " << format_float(r.delta, 9) << " (chaos requires delta < 0: "
        << (r.delta < 0.0 ? "pass" : "fail") << ")\n";
    out << "|omega|/|delta| = " << format_float(r.omega_over_delta, 9)
        << " (band [0.5, 2]: " << (r.omega_in_band ? "pass" : "fail") << ")\n";
    out << "tau/T = " << format_float(r.tau_over_width, 9) << " (band [pi/2, 2pi]: "
        << (r.tau_in_band ? "pass" : "fail") << ")\n";
    out << "note: the omega band is a heuristic factor-two quantification\n";
    return out.str();
}

}  // namespace pdnr
