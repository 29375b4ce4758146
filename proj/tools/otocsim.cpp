// otocsim — command-line front end: steady states, delayed-interferometer
// photon correlation sweeps, noise-difference maps, single multi-time
// correlators, and an engine-vs-dilation comparison table.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "otoc/collision.hpp"
#include "otoc/config.hpp"
#include "otoc/emitter.hpp"
#include "otoc/interferometer.hpp"
#include "otoc/liouvillian.hpp"
#include "otoc/multitime.hpp"
#include "otoc/operators.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::string preset;
    std::string out;
    int threads = 0;
    int precision = 0;
};

void add_common(CLI::App* cmd, CommonOpts* opts) {
    cmd->add_option("--config", opts->config_path, "config file (key = value lines)");
    cmd->add_option("--preset", opts->preset, "named preset (fig3, fig3-caption, fig4, fig5, fig6)");
    cmd->add_option("--out", opts->out, "output path (default: stdout)");
    cmd->add_option("--threads", opts->threads, "worker threads for grid sweeps");
    cmd->add_option("--precision", opts->precision, "decimal digits in emitted numbers");
}

otoc::RunConfig resolve_config(const CommonOpts& opts) {
    otoc::RunConfig cfg;
    if (!opts.preset.empty()) {
        const auto& table = otoc::presets();
        auto it = table.find(opts.preset);
        if (it == table.end())
            throw otoc::ConfigError("unknown preset '" + opts.preset + "'");
        cfg = otoc::parse_config(it->second);
    }
    if (!opts.config_path.empty()) {
        std::ifstream in(opts.config_path);
        if (!in) throw otoc::ConfigError("cannot open config file '" + opts.config_path + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        cfg = otoc::parse_config(ss.str(), cfg);
    }
    if (!opts.out.empty()) cfg.output_path = opts.out;
    if (opts.precision != 0) {
        if (opts.precision < 6 || opts.precision > 17)
            throw otoc::ConfigError("--precision must lie in [6, 17]");
        cfg.precision = opts.precision;
    }
    return cfg;
}

int thread_count(const CommonOpts& opts) {
    if (opts.threads > 0) return opts.threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

void emit(const otoc::RunConfig& cfg, const std::string& content) {
    if (cfg.output_path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(cfg.output_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file '" + cfg.output_path + "'");
    out << content;
}

// Grid sweep honoring the detector mode; A-minus-B subtracts per-detector
// results row by row (normalized: difference of the per-detector normalized
// values, each divided by its own squared flux).
std::vector<otoc::G2Result> scan_rows(const otoc::RunConfig& cfg,
                                      const std::vector<double>& tau_grid,
                                      const std::vector<double>& T_grid, int threads) {
    const bool include_noise = cfg.noise != otoc::NoiseMode::Off;
    const otoc::InterferometerParams p = cfg.interferometer(0.0);
    if (cfg.detector != otoc::DetectorMode::AMinusB) {
        const auto det =
            cfg.detector == otoc::DetectorMode::A ? otoc::Detector::A : otoc::Detector::B;
        return otoc::g2_scan(det, cfg.emitter, p, tau_grid, T_grid, include_noise, threads);
    }
    auto rows_a =
        otoc::g2_scan(otoc::Detector::A, cfg.emitter, p, tau_grid, T_grid, include_noise, threads);
    auto rows_b =
        otoc::g2_scan(otoc::Detector::B, cfg.emitter, p, tau_grid, T_grid, include_noise, threads);
    for (std::size_t i = 0; i < rows_a.size(); ++i) {
        rows_a[i].raw -= rows_b[i].raw;
        rows_a[i].raw_no_noise -= rows_b[i].raw_no_noise;
        rows_a[i].normalized -= rows_b[i].normalized;
        rows_a[i].max_imag = std::max(rows_a[i].max_imag, rows_b[i].max_imag);
    }
    return rows_a;
}

int run_steady(const otoc::RunConfig& cfg) {
    const otoc::Liouvillian liou = otoc::emitter_liouvillian(cfg.emitter);
    const otoc::DensityMatrix ss = otoc::steady_state(liou);
    std::ostringstream os;
    os << otoc::config_echo(cfg);
    const char* names[2] = {"g", "e"};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            os << "rho_ss[" << names[i] << "][" << names[j] << "] = "
               << otoc::format_double(ss.mat(i, j).real(), cfg.precision) << " "
               << otoc::format_double(ss.mat(i, j).imag(), cfg.precision) << "\n";
    os << "residual = "
       << otoc::format_double((liou.mat * otoc::vec_pairs(ss.mat)).norm(), cfg.precision)
       << "\n";
    emit(cfg, os.str());
    return 0;
}

int run_curve(const otoc::RunConfig& cfg, int threads) {
    const auto rows = scan_rows(cfg, cfg.tau_grid.values(), {cfg.delay}, threads);
    emit(cfg, otoc::g2_csv(cfg, rows));
    return 0;
}

int run_map(const otoc::RunConfig& cfg, int threads, bool diff_output) {
    const auto rows = scan_rows(cfg, cfg.tau_grid.values(), cfg.T_grid.values(), threads);
    emit(cfg, diff_output ? otoc::noise_diff_csv(cfg, rows) : otoc::g2_csv(cfg, rows));
    return 0;
}

int run_otoc(const otoc::RunConfig& cfg) {
    if (cfg.schedule.empty())
        throw otoc::ConfigError("otoc requires a schedule (e.g. schedule = sp@1.0, sp@0.0, sm@1.0, sm@0.0)");
    const otoc::Liouvillian liou = otoc::emitter_liouvillian(cfg.emitter);
    const otoc::NoiseModel model = otoc::noise_model(cfg.emitter);
    std::ostringstream os;
    os << otoc::config_echo(cfg);
    if (cfg.noise != otoc::NoiseMode::Off) {
        const otoc::Complex v = otoc::correlation(cfg.schedule, liou, model, std::nullopt, true);
        os << "otoc = " << otoc::format_double(v.real(), cfg.precision) << " "
           << otoc::format_double(v.imag(), cfg.precision) << "\n";
    }
    if (cfg.noise != otoc::NoiseMode::On) {
        const otoc::Complex v = otoc::correlation(cfg.schedule, liou, model, std::nullopt, false);
        os << "otoc_no_noise = " << otoc::format_double(v.real(), cfg.precision) << " "
           << otoc::format_double(v.imag(), cfg.precision) << "\n";
    }
    emit(cfg, os.str());
    return 0;
}

int run_oracle_compare(const otoc::RunConfig& cfg) {
    const otoc::Liouvillian liou = otoc::emitter_liouvillian(cfg.emitter);
    const otoc::NoiseModel model = otoc::noise_model(cfg.emitter);
    std::ostringstream os;
    os << otoc::config_echo(cfg);
    os << "tau,dt,engine_re,engine_im,oracle_re,oracle_im,abs_err,rel_err\n";
    for (double tau : cfg.tau_grid.values()) {
        otoc::EventSchedule schedule{{otoc::sigma_plus(), tau},
                                     {otoc::sigma_plus(), 0.0},
                                     {otoc::sigma_minus(), tau},
                                     {otoc::sigma_minus(), 0.0}};
        const otoc::Complex engine =
            otoc::correlation(schedule, liou, model, std::nullopt, true);
        for (double dt : cfg.oracle_dts) {
            otoc::CollisionConfig ccfg;
            ccfg.dt = dt;
            ccfg.n_steps = std::max(1, static_cast<int>(std::lround(tau / dt)));
            ccfg.thermal = cfg.emitter.nbar > 0.0;
            const otoc::Complex oracle = otoc::oracle_correlation(schedule, cfg.emitter, ccfg);
            const double abs_err = std::abs(engine - oracle);
            const double rel_err = std::abs(engine) > 0 ? abs_err / std::abs(engine) : 0.0;
            os << otoc::format_double(tau, cfg.precision) << ","
               << otoc::format_double(dt, cfg.precision) << ","
               << otoc::format_double(engine.real(), cfg.precision) << ","
               << otoc::format_double(engine.imag(), cfg.precision) << ","
               << otoc::format_double(oracle.real(), cfg.precision) << ","
               << otoc::format_double(oracle.imag(), cfg.precision) << ","
               << otoc::format_double(abs_err, cfg.precision) << ","
               << otoc::format_double(rel_err, cfg.precision) << "\n";
        }
    }
    emit(cfg, os.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Photon correlation simulator for a two-level emitter behind a delay interferometer"};
    app.require_subcommand(1);

    CommonOpts opts;
    CLI::App* steady = app.add_subcommand("steady", "print the emitter steady state");
    CLI::App* curve = app.add_subcommand("g2-curve", "G2 vs tau at fixed delay T (CSV)");
    CLI::App* map = app.add_subcommand("g2-map", "G2 over the (tau, T) grid (CSV)");
    CLI::App* ndiff = app.add_subcommand("noise-diff", "raw minus no-noise map (CSV)");
    CLI::App* otoc_cmd = app.add_subcommand("otoc", "evaluate a single schedule from config");
    CLI::App* oracle = app.add_subcommand("oracle-compare", "engine vs collision-dilation table (CSV)");
    for (CLI::App* cmd : {steady, curve, map, ndiff, otoc_cmd, oracle}) add_common(cmd, &opts);

    CLI11_PARSE(app, argc, argv);

    try {
        const otoc::RunConfig cfg = resolve_config(opts);
        const int threads = thread_count(opts);
        if (steady->parsed()) return run_steady(cfg);
        if (curve->parsed()) return run_curve(cfg, threads);
        if (map->parsed()) return run_map(cfg, threads, false);
        if (ndiff->parsed()) return run_map(cfg, threads, true);
        if (otoc_cmd->parsed()) return run_otoc(cfg);
        if (oracle->parsed()) return run_oracle_compare(cfg);
    } catch (const otoc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
