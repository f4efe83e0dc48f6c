#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pdnr/io.hpp"
#include "pdnr/model.hpp"

namespace pdnr {

class config_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class Method { kMaster, kQsd, kSemiclassical };
enum class Instant { kAtMinN, kAtMaxN, kBetween, kAtTime };

inline const char* method_name(Method m) {
    switch (m) {
        case Method::kMaster: return "master";
        case Method::kQsd: return "qsd";
        case Method::kSemiclassical: return "semiclassical";
    }
    return "?";
}

inline const char* instant_name(Instant s) {
    switch (s) {
        case Instant::kAtMinN: return "at_min_n";
        case Instant::kAtMaxN: return "at_max_n";
        case Instant::kBetween: return "between";
        case Instant::kAtTime: return "at_time";
    }
    return "?";
}

// Flat key=value run configuration. Unknown keys are rejected; the canonical
// echo written next to every output reproduces the run exactly.
struct RunConfig {
    // model
    double delta = 0.0;
    double chi = 0.0;
    double intensity = 0.0;
    double phase = 0.0;
    double n_bath = 0.0;
    int dim = 40;
    bool pulsed = false;
    double pulse_t0 = 0.0;
    double pulse_width = 1.0;
    double pulse_separation = 1.0;
    std::optional<int> pulse_count;  // nullopt = auto
    // run
    Method method = Method::kMaster;
    double t_end = 10.0;
    double step = 0.0;  // 0 = method default (master/semiclassical 1e-3, qsd 5e-4)
    double sample_dt = 0.01;
    int n_traj = 2000;
    std::uint64_t seed = 1234567;
    // wigner
    double grid_span = 6.0;
    int grid_points = 101;
    double hump_threshold = 0.2;
    Instant instant = Instant::kAtMaxN;
    double instant_time = 0.0;
    // semiclassical
    double alpha0_re = 0.1;
    double alpha0_im = 0.1;
    int strobe_periods = 512;

    double resolved_step() const {
        if (step > 0.0) return step;
        return method == Method::kQsd ? 5e-4 : 1e-3;
    }

    ModelParams model() const {
        ModelParams p;
        p.delta = delta;
        p.chi = chi;
        p.intensity = intensity;
        p.phase = phase;
        p.gamma = 1.0;
        p.n_bath = n_bath;
        p.dim = dim;
        if (pulsed) {
            PulseTrain train;
            train.t0 = pulse_t0;
            train.width = pulse_width;
            train.separation = pulse_separation;
            train.count = pulse_count;
            p.pulse = train;
        }
        return p;
    }

    std::vector<double> sample_grid() const {
        const long n = std::lround(t_end / sample_dt);
        std::vector<double> grid;
        grid.reserve(static_cast<std::size_t>(n) + 1);
        for (long k = 0; k <= n; ++k) grid.push_back(static_cast<double>(k) * sample_dt);
        return grid;
    }

    void validate() const {
        if (dim < 2) throw config_error("config: dim must be >= 2");
        if (n_bath < 0.0) throw config_error("config: n_bath must be >= 0");
        if (intensity < 0.0) throw config_error("config: intensity must be >= 0");
        if (pulsed) {
            if (pulse_width <= 0.0) throw config_error("config: pulse_width must be positive");
            if (pulse_separation <= 0.0)
                throw config_error("config: pulse_separation must be positive");
            if (pulse_count && *pulse_count < 1)
                throw config_error("config: pulse_count must be positive or auto");
        }
        if (sample_dt <= 0.0) throw config_error("config: sample_dt must be positive");
        if (t_end <= 0.0 || std::lround(t_end / sample_dt) < 1)
            throw config_error("config: empty sample schedule (t_end/sample_dt)");
        if (step < 0.0) throw config_error("config: step must be positive");
        if (n_traj < 1) throw config_error("config: n_traj must be >= 1");
        if (grid_points < 2) throw config_error("config: grid_points must be >= 2");
        if (grid_span <= 0.0) throw config_error("config: grid_span must be positive");
        if (!(hump_threshold > 0.0 && hump_threshold < 1.0))
            throw config_error("config: hump_threshold must be in (0,1)");
        if (instant == Instant::kAtTime && !(instant_time >= 0.0))
            throw config_error("config: instant_time must be >= 0");
        if (strobe_periods < 1) throw config_error("config: strobe_periods must be >= 1");
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    double out = 0.0;
    try {
        out = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw config_error("config: key '" + key + "' has non-numeric value '" + v + "'");
    }
    if (pos != v.size())
        throw config_error("config: key '" + key + "' has trailing junk in value '" + v + "'");
    return out;
}

inline long parse_long(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    long out = 0;
    try {
        out = std::stol(v, &pos);
    } catch (const std::exception&) {
        throw config_error("config: key '" + key + "' has non-integer value '" + v + "'");
    }
    if (pos != v.size())
        throw config_error("config: key '" + key + "' has trailing junk in value '" + v + "'");
    return out;
}

}  // namespace detail

inline RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::map<std::string, bool> seen;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("config: line " + std::to_string(line_no) +
                               " is not 'key = value'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw config_error("config: line " + std::to_string(line_no) +
                               " has empty key or value");
        if (seen[key]) throw config_error("config: duplicate key '" + key + "'");
        seen[key] = true;

        if (key == "delta") cfg.delta = detail::parse_double(key, value);
        else if (key == "chi") cfg.chi = detail::parse_double(key, value);
        else if (key == "intensity") cfg.intensity = detail::parse_double(key, value);
        else if (key == "phase") cfg.phase = detail::parse_double(key, value);
        else if (key == "n_bath") cfg.n_bath = detail::parse_double(key, value);
        else if (key == "dim") cfg.dim = static_cast<int>(detail::parse_long(key, value));
        else if (key == "pulse") {
            if (value == "gaussian") cfg.pulsed = true;
            else if (value == "cw") cfg.pulsed = false;
            else throw config_error("config: pulse must be 'gaussian' or 'cw', got '" + value + "'");
        } else if (key == "pulse_t0") cfg.pulse_t0 = detail::parse_double(key, value);
        else if (key == "pulse_width") cfg.pulse_width = detail::parse_double(key, value);
        else if (key == "pulse_separation") cfg.pulse_separation = detail::parse_double(key, value);
        else if (key == "pulse_count") {
            if (value == "auto") cfg.pulse_count.reset();
            else cfg.pulse_count = static_cast<int>(detail::parse_long(key, value));
        } else if (key == "method") {
            if (value == "master") cfg.method = Method::kMaster;
            else if (value == "qsd") cfg.method = Method::kQsd;
            else if (value == "semiclassical") cfg.method = Method::kSemiclassical;
            else throw config_error("config: unknown method '" + value + "'");
        } else if (key == "t_end") cfg.t_end = detail::parse_double(key, value);
        else if (key == "step") cfg.step = detail::parse_double(key, value);
        else if (key == "sample_dt") cfg.sample_dt = detail::parse_double(key, value);
        else if (key == "n_traj") cfg.n_traj = static_cast<int>(detail::parse_long(key, value));
        else if (key == "seed") {
            try {
                cfg.seed = std::stoull(value);
            } catch (const std::exception&) {
                throw config_error("config: key 'seed' has non-integer value '" + value + "'");
            }
        } else if (key == "grid_span") cfg.grid_span = detail::parse_double(key, value);
        else if (key == "grid_points") cfg.grid_points = static_cast<int>(detail::parse_long(key, value));
        else if (key == "hump_threshold") cfg.hump_threshold = detail::parse_double(key, value);
        else if (key == "instant") {
            if (value == "at_min_n") cfg.instant = Instant::kAtMinN;
            else if (value == "at_max_n") cfg.instant = Instant::kAtMaxN;
            else if (value == "between") cfg.instant = Instant::kBetween;
            else if (value == "at_time") cfg.instant = Instant::kAtTime;
            else throw config_error("config: unknown instant '" + value + "'");
        } else if (key == "instant_time") cfg.instant_time = detail::parse_double(key, value);
        else if (key == "alpha0_re") cfg.alpha0_re = detail::parse_double(key, value);
        else if (key == "alpha0_im") cfg.alpha0_im = detail::parse_double(key, value);
        else if (key == "strobe_periods") cfg.strobe_periods = static_cast<int>(detail::parse_long(key, value));
        else throw config_error("config: unknown key '" + key + "'");
    }
    cfg.validate();
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    return parse_config_text(read_text_file(path));
}

// Canonical serialization; parsing it back reproduces the run bit for bit.
inline std::string config_to_text(const RunConfig& cfg) {
    std::ostringstream out;
    auto f = [](double v) { return format_float(v, 17); };
    out << "# pdnr run configuration\n";
    out << "delta = " << f(cfg.delta) << "\n";
    out << "chi = " << f(cfg.chi) << "\n";
    out << "intensity = " << f(cfg.intensity) << "\n";
    out << "phase = " << f(cfg.phase) << "\n";
    out << "n_bath = " << f(cfg.n_bath) << "\n";
    out << "dim = " << cfg.dim << "\n";
    out << "pulse = " << (cfg.pulsed ? "gaussian" : "cw") << "\n";
    out << "pulse_t0 = " << f(cfg.pulse_t0) << "\n";
    out << "pulse_width = " << f(cfg.pulse_width) << "\n";
    out << "pulse_separation = " << f(cfg.pulse_separation) << "\n";
    out << "pulse_count = " << (cfg.pulse_count ? std::to_string(*cfg.pulse_count) : "auto")
        << "\n";
    out << "method = " << method_name(cfg.method) << "\n";
    out << "t_end = " << f(cfg.t_end) << "\n";
    out << "step = " << f(cfg.resolved_step()) << "\n";
    out << "sample_dt = " << f(cfg.sample_dt) << "\n";
    out << "n_traj = " << cfg.n_traj << "\n";
    out << "seed = " << cfg.seed << "\n";
    out << "grid_span = " << f(cfg.grid_span) << "\n";
    out << "grid_points = " << cfg.grid_points << "\n";
    out << "hump_threshold = " << f(cfg.hump_threshold) << "\n";
    out << "instant = " << instant_name(cfg.instant) << "\n";
    out << "instant_time = " << f(cfg.instant_time) << "\n";
    out << "alpha0_re = " << f(cfg.alpha0_re) << "\n";
    out << "alpha0_im = " << f(cfg.alpha0_im) << "\n";
    out << "strobe_periods = " << cfg.strobe_periods << "\n";
    return out.str();
}

// Figure-reproduction presets. Sampling is commensurate with the pulse
// period (sample_dt = tau/256 exactly), so cycle-against-cycle checks line
// up sample by sample.
inline RunConfig make_preset(const std::string& name) {
    auto base = [](double delta, double chi, double intensity, double width, double sep,
                   int dim) {
        RunConfig c;
        c.delta = delta;
        c.chi = chi;
        c.intensity = intensity;
        c.phase = 0.0;
        c.n_bath = 0.0;
        c.dim = dim;
        c.pulsed = true;
        c.pulse_t0 = 3.0 * width;
        c.pulse_width = width;
        c.pulse_separation = sep;
        c.sample_dt = sep / 256.0;
        c.step = c.sample_dt / 10.0;
        c.t_end = 3232.0 * c.sample_dt;  // 12.625 pulse periods
        c.method = Method::kMaster;
        return c;
    };
    const double tau_fig1 = 4.0 * M_PI / 5.0;

    RunConfig c;
    if (name == "fig1a") {
        c = base(-20.0, 1.0, 400.0, 0.5, tau_fig1, 56);
    } else if (name == "fig1b") {
        c = base(20.0, 1.0, 400.0, 0.5, tau_fig1, 40);
    } else if (name == "fig2a") {
        c = base(-20.0, 1.0, 400.0, 0.5, tau_fig1, 56);
        c.instant = Instant::kAtMinN;
    } else if (name == "fig2b") {
        c = base(-20.0, 1.0, 400.0, 0.5, tau_fig1, 56);
        c.instant = Instant::kAtMaxN;
    } else if (name == "fig2c") {
        c = base(20.0, 1.0, 400.0, 0.5, tau_fig1, 40);
        c.instant = Instant::kAtMinN;
    } else if (name == "fig2d") {
        c = base(20.0, 1.0, 400.0, 0.5, tau_fig1, 40);
        c.instant = Instant::kAtMaxN;
    } else if (name == "fig3a") {
        c = base(20.0, 1.0, 400.0, 0.5, tau_fig1, 40);
        c.instant = Instant::kBetween;
    } else if (name == "fig3b") {
        c = base(-20.0, 1.0, 400.0, 0.5, tau_fig1, 56);
        c.instant = Instant::kBetween;
    } else if (name == "fig4ab") {
        c = base(-7.5, 0.5, 100.0, 0.25, 2.0 * M_PI / 5.0, 40);
        c.instant = Instant::kAtMaxN;
    } else if (name == "fig4c") {
        c = base(15.0, 1.0, 100.0, 0.5, 2.0 * M_PI, 40);
        c.step = c.sample_dt / 32.0;
        c.t_end = 1696.0 * c.sample_dt;  // 6.625 pulse periods
        c.instant = Instant::kAtMaxN;
    } else {
        throw config_error("unknown preset '" + name + "'");
    }
    c.validate();
    return c;
}

inline std::vector<std::string> preset_names() {
    return {"fig1a", "fig1b", "fig2a", "fig2b", "fig2c", "fig2d",
            "fig3a", "fig3b", "fig4ab", "fig4c"};
}

}  // namespace pdnr
