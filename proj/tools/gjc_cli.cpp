// gjc: command-line front end.
//
//   gjc run <config>        propagate and write trajectory CSVs + manifest
//   gjc spectrum <config>   write the dressed-state spectrum JSON
//   gjc sweep <glob>        run every matching config, one directory each
//   gjc validate <config>   parse and check a config without running it
//
// Exit codes: 0 success, 1 configuration or usage error, 2 numerical
// validity failure (norm drift, truncation, unstable step), 3 I/O failure.

#include <glob.h>

#include <algorithm>
#include <atomic>
#include <iostream>
#include <map>
#include <mutex>
#include <thread>

#include <CLI11.hpp>

#include "gjc/config.hpp"
#include "gjc/scenario.hpp"

namespace {

enum Exit { kOk = 0, kConfig = 1, kNumerical = 2, kIo = 3 };

std::mutex g_out;

void report_manifest(const gjc::RunManifest& m, const std::filesystem::path& dir) {
    std::lock_guard<std::mutex> lock(g_out);
    std::cout << m.config.name << ": " << (m.valid() ? "ok" : "INVALID") << " (n = " << m.config.resonance.n
              << ", Rabi period " << m.rabi_period_periods << " T, " << m.elapsed_seconds << " s)\n";
    for (const auto& f : m.files) {
        std::cout << "  wrote " << (dir / f).string() << '\n';
    }
    if (!m.error.empty()) {
        std::cerr << m.config.name << ": " << m.error << '\n';
    }
    for (const auto& w : m.rwa_warnings) {
        std::cerr << m.config.name << ": warning: " << w << '\n';
    }
    for (const auto& w : m.numeric_warnings) {
        std::cerr << m.config.name << ": warning: " << w << '\n';
    }
}

int run_one(const gjc::ScenarioConfig& cfg, const std::filesystem::path& dir) {
    try {
        const auto res = gjc::run_scenario(cfg, dir);
        report_manifest(res.manifest, dir);
        return res.manifest.valid() ? kOk : kNumerical;
    } catch (const gjc::IoError& e) {
        std::lock_guard<std::mutex> lock(g_out);
        std::cerr << cfg.name << ": " << e.what() << '\n';
        return kIo;
    }
}

std::vector<std::string> expand_glob(const std::string& pattern) {
    glob_t g{};
    std::vector<std::string> out;
    if (::glob(pattern.c_str(), 0, nullptr, &g) == 0) {
        for (std::size_t i = 0; i < g.gl_pathc; ++i) {
            out.emplace_back(g.gl_pathv[i]);
        }
    }
    globfree(&g);
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-level system with permanent dipoles coupled to a quantized oscillator"};
    app.set_version_flag("--version", gjc::version());
    app.require_subcommand(1);

    gjc::ConfigOverrides ov;
    double dt = 0.0, t_end = 0.0;
    std::size_t n_max = 0;
    auto add_overrides = [&](CLI::App* sub) {
        sub->add_option("--dt", dt, "time step in oscillator periods");
        sub->add_option("--n-max", n_max, "photon-number truncation");
        sub->add_option("--t-end", t_end, "run length in oscillator periods");
    };

    std::string config_path;
    auto* run = app.add_subcommand("run", "propagate a scenario and write its trajectories");
    run->add_option("config", config_path, "scenario file")->required();
    add_overrides(run);

    auto* spectrum = app.add_subcommand("spectrum", "write the dressed-state spectrum of a scenario");
    spectrum->add_option("config", config_path, "scenario file")->required();

    std::string pattern;
    unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
    auto* sweep = app.add_subcommand("sweep", "run every scenario matching a glob, in parallel");
    sweep->add_option("pattern", pattern, "glob of scenario files")->required();
    sweep->add_option("-j,--jobs", jobs, "parallel scenarios")->check(CLI::PositiveNumber);
    add_overrides(sweep);

    auto* validate = app.add_subcommand("validate", "check a scenario file without running it");
    validate->add_option("config", config_path, "scenario file")->required();
    add_overrides(validate);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfig;
    }

    for (auto* sub : {run, sweep, validate}) {
        if (sub->parsed()) {
            if (sub->count("--dt") != 0) ov.dt_periods = dt;
            if (sub->count("--n-max") != 0) ov.n_max = n_max;
            if (sub->count("--t-end") != 0) ov.t_end_periods = t_end;
        }
    }

    try {
        if (validate->parsed()) {
            const auto cfg = gjc::load_config(config_path, ov);
            std::cout << cfg.name << ": valid (n = " << cfg.resonance.n << ", omega0 = " << cfg.params.omega0
                      << ", t_end = " << cfg.run.t_end_periods << " T, n_max = " << cfg.run.n_max << ")\n";
            for (const auto& w : gjc::rwa_validity_warnings(cfg.params, cfg.resonance, gjc::driven_manifold(cfg),
                                                            cfg.resonance_window)) {
                std::cerr << cfg.name << ": warning: " << w << '\n';
            }
            return kOk;
        }
        if (run->parsed()) {
            const auto cfg = gjc::load_config(config_path, ov);
            return run_one(cfg, gjc::resolve_output_dir(cfg));
        }
        if (spectrum->parsed()) {
            const auto cfg = gjc::load_config(config_path, ov);
            const auto dir = gjc::resolve_output_dir(cfg);
            report_manifest(gjc::run_spectrum(cfg, dir), dir);
            return kOk;
        }
        if (sweep->parsed()) {
            const auto files = expand_glob(pattern);
            if (files.empty()) {
                std::cerr << "no scenario files match '" << pattern << "'\n";
                return kConfig;
            }
            // every config is checked before any run starts
            std::vector<gjc::ScenarioConfig> cfgs;
            std::map<std::string, std::string> seen;
            bool bad = false;
            for (const auto& f : files) {
                try {
                    cfgs.push_back(gjc::load_config(f, ov));
                    const auto [it, fresh] = seen.emplace(cfgs.back().name, f);
                    if (!fresh) {
                        std::cerr << f << ": scenario name '" << it->first << "' already used by " << it->second
                                  << '\n';
                        bad = true;
                    }
                } catch (const gjc::ConfigError& e) {
                    std::cerr << f << ": " << e.what() << '\n';
                    bad = true;
                }
            }
            if (bad) {
                return kConfig;
            }
            std::vector<int> codes(cfgs.size(), kOk);
            std::atomic<std::size_t> next{0};
            auto worker = [&] {
                for (std::size_t i = next++; i < cfgs.size(); i = next++) {
                    codes[i] = run_one(cfgs[i], gjc::resolve_output_dir(cfgs[i]) / cfgs[i].name);
                }
            };
            std::vector<std::thread> pool;
            for (unsigned k = 0; k < std::min<std::size_t>(jobs, cfgs.size()); ++k) {
                pool.emplace_back(worker);
            }
            for (auto& t : pool) {
                t.join();
            }
            return *std::max_element(codes.begin(), codes.end());
        }
    } catch (const gjc::ConfigError& e) {
        std::cerr << e.what() << '\n';
        return kConfig;
    } catch (const gjc::IoError& e) {
        std::cerr << e.what() << '\n';
        return kIo;
    }
    return kConfig;
}
