// config.hpp — Run configuration: line-based `key = value` parsing with hard
// errors on unknown keys, named experiment presets, and deterministic CSV
// emission for external plotting.

#pragma once

#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "otoc/emitter.hpp"
#include "otoc/interferometer.hpp"
#include "otoc/multitime.hpp"
#include "otoc/operators.hpp"

namespace otoc {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GridSpec {
    double min = 0.0;
    double max = 0.0;
    double step = 1.0;

    int points() const {
        return static_cast<int>(std::floor((max - min) / step + 1e-9)) + 1;
    }
    double at(int i) const { return min + i * step; }
    std::vector<double> values() const {
        std::vector<double> v;
        v.reserve(static_cast<std::size_t>(points()));
        for (int i = 0; i < points(); ++i) v.push_back(at(i));
        return v;
    }
};

enum class DetectorMode { A, B, AMinusB };
enum class NoiseMode { On, Off, Both };

struct RunConfig {
    EmitterParams emitter;
    double t1 = 1.0 / std::sqrt(2.0);
    double r1 = 1.0 / std::sqrt(2.0);
    double t2 = 1.0 / std::sqrt(2.0);
    double r2 = 1.0 / std::sqrt(2.0);
    double delay = 0.0;  // fixed T for g2-curve and otoc/oracle runs
    GridSpec tau_grid{0.0, 4.0, 0.1};
    GridSpec T_grid{0.0, 4.0, 0.1};
    DetectorMode detector = DetectorMode::A;
    NoiseMode noise = NoiseMode::Both;
    std::string output_path;
    int precision = 12;
    EventSchedule schedule;              // for the otoc subcommand
    std::vector<double> oracle_dts{0.02};

    InterferometerParams interferometer(double T) const {
        InterferometerParams p{t1, r1, t2, r2, T};
        p.validate();
        return p;
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline double parse_number(const std::string& value, int line) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("");
        return x;
    } catch (...) {
        throw ConfigError("config line " + std::to_string(line) + ": malformed number '" +
                          value + "'");
    }
}

inline Matrix schedule_operator(const std::string& name, int line) {
    if (name == "sp") return sigma_plus();
    if (name == "sm") return sigma_minus();
    if (name == "n") return sigma_plus() * sigma_minus();
    if (name == "x") return sigma_x();
    if (name == "y") return sigma_y();
    if (name == "z") return sigma_z();
    if (name == "id") return Matrix::Identity(2, 2);
    throw ConfigError("config line " + std::to_string(line) + ": unknown schedule operator '" +
                      name + "' (use sp, sm, n, x, y, z, id)");
}

inline EventSchedule parse_schedule(const std::string& value, int line) {
    EventSchedule schedule;
    std::stringstream ss(value);
    std::string entry;
    while (std::getline(ss, entry, ',')) {
        entry = trim(entry);
        if (entry.empty()) continue;
        const auto at = entry.find('@');
        if (at == std::string::npos)
            throw ConfigError("config line " + std::to_string(line) +
                              ": schedule entries must look like op@time");
        schedule.push_back({schedule_operator(trim(entry.substr(0, at)), line),
                            parse_number(trim(entry.substr(at + 1)), line)});
    }
    if (schedule.empty())
        throw ConfigError("config line " + std::to_string(line) + ": empty schedule");
    return schedule;
}

}  // namespace detail

// Line-based `key = value` text; `#` starts a comment. Unknown keys are hard
// errors. Omitted beamsplitter partners are derived from t^2 + r^2 = 1.
// `base` carries already-resolved values to overlay (presets under a user
// config file); line numbers always refer to `text` alone.
inline RunConfig parse_config(const std::string& text, const RunConfig& base = RunConfig{}) {
    RunConfig cfg = base;
    std::optional<double> t1, r1, t2, r2;
    std::map<std::string, int> key_line;

    std::stringstream ss(text);
    std::string raw;
    int line = 0;
    while (std::getline(ss, raw)) {
        ++line;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw = raw.substr(0, hash);
        raw = detail::trim(raw);
        if (raw.empty()) continue;
        const auto eq = raw.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line) + ": expected key = value");
        const std::string key = detail::trim(raw.substr(0, eq));
        const std::string value = detail::trim(raw.substr(eq + 1));
        key_line[key] = line;

        if (key == "omega") cfg.emitter.omega = detail::parse_number(value, line);
        else if (key == "delta") cfg.emitter.delta = detail::parse_number(value, line);
        else if (key == "gamma") cfg.emitter.gamma = detail::parse_number(value, line);
        else if (key == "nbar") cfg.emitter.nbar = detail::parse_number(value, line);
        else if (key == "t1") t1 = detail::parse_number(value, line);
        else if (key == "r1") r1 = detail::parse_number(value, line);
        else if (key == "t2") t2 = detail::parse_number(value, line);
        else if (key == "r2") r2 = detail::parse_number(value, line);
        else if (key == "T") cfg.delay = detail::parse_number(value, line);
        else if (key == "tau_min") cfg.tau_grid.min = detail::parse_number(value, line);
        else if (key == "tau_max") cfg.tau_grid.max = detail::parse_number(value, line);
        else if (key == "tau_step") cfg.tau_grid.step = detail::parse_number(value, line);
        else if (key == "T_min") cfg.T_grid.min = detail::parse_number(value, line);
        else if (key == "T_max") cfg.T_grid.max = detail::parse_number(value, line);
        else if (key == "T_step") cfg.T_grid.step = detail::parse_number(value, line);
        else if (key == "detector") {
            if (value == "A") cfg.detector = DetectorMode::A;
            else if (value == "B") cfg.detector = DetectorMode::B;
            else if (value == "A-minus-B") cfg.detector = DetectorMode::AMinusB;
            else
                throw ConfigError("config line " + std::to_string(line) +
                                  ": detector must be A, B or A-minus-B");
        } else if (key == "noise") {
            if (value == "on") cfg.noise = NoiseMode::On;
            else if (value == "off") cfg.noise = NoiseMode::Off;
            else if (value == "both") cfg.noise = NoiseMode::Both;
            else
                throw ConfigError("config line " + std::to_string(line) +
                                  ": noise must be on, off or both");
        } else if (key == "out") {
            cfg.output_path = value;
        } else if (key == "precision") {
            cfg.precision = static_cast<int>(detail::parse_number(value, line));
        } else if (key == "schedule") {
            cfg.schedule = detail::parse_schedule(value, line);
        } else if (key == "oracle_dt") {
            cfg.oracle_dts.clear();
            std::stringstream ds(value);
            std::string item;
            while (std::getline(ds, item, ','))
                cfg.oracle_dts.push_back(detail::parse_number(detail::trim(item), line));
        } else {
            throw ConfigError("config line " + std::to_string(line) + ": unknown key '" + key +
                              "'");
        }
    }

    auto line_of = [&](const std::string& key) {
        auto it = key_line.find(key);
        return it == key_line.end() ? 0 : it->second;
    };
    auto fail = [&](const std::string& key, const std::string& msg) {
        const int l = line_of(key);
        throw ConfigError((l ? "config line " + std::to_string(l) + ": " : "config: ") + msg);
    };

    auto resolve_pair = [&](std::optional<double> t, std::optional<double> r,
                            const std::string& tk, const std::string& rk, double& t_out,
                            double& r_out) {
        if (t && !(*t >= 0.0 && *t <= 1.0)) fail(tk, tk + " must lie in [0, 1]");
        if (r && !(*r >= 0.0 && *r <= 1.0)) fail(rk, rk + " must lie in [0, 1]");
        if (t && r) {
            if (std::abs(*t * *t + *r * *r - 1.0) > 1e-12)
                fail(tk, tk + "^2 + " + rk + "^2 must equal 1 within 1e-12");
            t_out = *t;
            r_out = *r;
        } else if (t) {
            t_out = *t;
            r_out = std::sqrt(std::max(0.0, 1.0 - *t * *t));
        } else if (r) {
            r_out = *r;
            t_out = std::sqrt(std::max(0.0, 1.0 - *r * *r));
        }
    };
    resolve_pair(t1, r1, "t1", "r1", cfg.t1, cfg.r1);
    resolve_pair(t2, r2, "t2", "r2", cfg.t2, cfg.r2);

    if (!(cfg.emitter.gamma > 0.0)) fail("gamma", "gamma must be > 0");
    if (!(cfg.emitter.nbar >= 0.0)) fail("nbar", "nbar must be >= 0");
    if (!(cfg.delay >= 0.0)) fail("T", "T must be >= 0");
    for (const auto& [name, grid] :
         std::initializer_list<std::pair<const char*, const GridSpec*>>{
             {"tau", &cfg.tau_grid}, {"T", &cfg.T_grid}}) {
        if (!(grid->step > 0.0)) fail(std::string(name) + "_step",
                                      std::string(name) + "_step must be > 0");
        if (grid->max < grid->min)
            fail(std::string(name) + "_max",
                 std::string(name) + " grid must be ascending (max >= min)");
        if (!(grid->min >= 0.0))
            fail(std::string(name) + "_min", std::string(name) + "_min must be >= 0");
    }
    if (cfg.precision < 6 || cfg.precision > 17)
        fail("precision", "precision must lie in [6, 17]");
    for (double dt : cfg.oracle_dts)
        if (!(dt > 0.0)) fail("oracle_dt", "oracle_dt values must be > 0");
    cfg.emitter.validate();
    return cfg;
}

// Presets are ordinary config texts run through the same parser. fig3 uses
// the coherent-drive text parameters; fig3-caption the caption's Omega = 3.
inline const std::map<std::string, std::string>& presets() {
    static const std::map<std::string, std::string> map = {
        {"fig3",
         "omega = 2.0\ndelta = 0.0\nnbar = 0.0\nT = 1.0\n"
         "tau_min = 0.0\ntau_max = 6.0\ntau_step = 0.05\n"},
        {"fig3-caption",
         "omega = 3.0\ndelta = 0.0\nnbar = 0.0\nT = 1.0\n"
         "tau_min = 0.0\ntau_max = 6.0\ntau_step = 0.05\n"},
        {"fig4",
         "omega = 2.0\ndelta = 0.0\nnbar = 0.0\n"
         "tau_min = 0.0\ntau_max = 4.0\ntau_step = 0.1\n"
         "T_min = 0.0\nT_max = 4.0\nT_step = 0.1\n"},
        {"fig5",
         "omega = 0.0\ndelta = 0.0\nnbar = 1.0\nT = 1.0\n"
         "tau_min = 0.0\ntau_max = 4.0\ntau_step = 0.05\n"},
        {"fig6",
         "omega = 0.0\ndelta = 0.0\nnbar = 1.0\n"
         "tau_min = 0.0\ntau_max = 4.0\ntau_step = 0.1\n"
         "T_min = 0.0\nT_max = 4.0\nT_step = 0.1\n"},
    };
    return map;
}

inline std::string format_double(double x, int precision) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", precision, x);
    return buf;
}

// Full resolved parameter set as `#` comment lines, fixed order, so emitted
// files are unambiguous and byte-identical for identical configs.
inline std::string config_echo(const RunConfig& cfg) {
    std::ostringstream os;
    const int p = cfg.precision;
    os << "# omega = " << format_double(cfg.emitter.omega, p) << "\n"
       << "# delta = " << format_double(cfg.emitter.delta, p) << "\n"
       << "# gamma = " << format_double(cfg.emitter.gamma, p) << "\n"
       << "# nbar = " << format_double(cfg.emitter.nbar, p) << "\n"
       << "# t1 = " << format_double(cfg.t1, p) << "\n"
       << "# r1 = " << format_double(cfg.r1, p) << "\n"
       << "# t2 = " << format_double(cfg.t2, p) << "\n"
       << "# r2 = " << format_double(cfg.r2, p) << "\n"
       << "# T = " << format_double(cfg.delay, p) << "\n"
       << "# tau_grid = " << format_double(cfg.tau_grid.min, p) << ":"
       << format_double(cfg.tau_grid.max, p) << ":" << format_double(cfg.tau_grid.step, p)
       << "\n"
       << "# T_grid = " << format_double(cfg.T_grid.min, p) << ":"
       << format_double(cfg.T_grid.max, p) << ":" << format_double(cfg.T_grid.step, p) << "\n"
       << "# detector = "
       << (cfg.detector == DetectorMode::A ? "A"
                                           : cfg.detector == DetectorMode::B ? "B" : "A-minus-B")
       << "\n"
       << "# noise = "
       << (cfg.noise == NoiseMode::On ? "on" : cfg.noise == NoiseMode::Off ? "off" : "both")
       << "\n"
       << "# precision = " << cfg.precision << "\n";
    return os.str();
}

inline std::string g2_csv(const RunConfig& cfg, const std::vector<G2Result>& rows) {
    std::ostringstream os;
    os << config_echo(cfg);
    os << "tau,T,g2_raw,g2_no_noise,g2_normalized\n";
    for (const auto& r : rows)
        os << format_double(r.tau, cfg.precision) << "," << format_double(r.T, cfg.precision)
           << "," << format_double(r.raw, cfg.precision) << ","
           << format_double(r.raw_no_noise, cfg.precision) << ","
           << format_double(r.normalized, cfg.precision) << "\n";
    return os.str();
}

inline std::string noise_diff_csv(const RunConfig& cfg, const std::vector<G2Result>& rows) {
    std::ostringstream os;
    os << config_echo(cfg);
    os << "tau,T,noise_diff\n";
    for (const auto& r : rows)
        os << format_double(r.tau, cfg.precision) << "," << format_double(r.T, cfg.precision)
           << "," << format_double(r.raw - r.raw_no_noise, cfg.precision) << "\n";
    return os.str();
}

}  // namespace otoc
