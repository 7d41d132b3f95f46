#include "gjc/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <numbers>
#include <system_error>

#include <json.hpp>

namespace gjc {

namespace {

using json = nlohmann::ordered_json;

double period(const ModelParams& p) { return 2.0 * std::numbers::pi / p.omega; }

std::string utc_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

int highest_relevant_manifold(const ScenarioConfig& cfg) {
    const auto top = static_cast<int>(cfg.run.n_max) - 1;
    int m = driven_manifold(cfg);
    if (cfg.initial.kind == InitialKind::ground_coherent) {
        const double mean = cfg.initial.mean_photons;
        m = std::max(m, static_cast<int>(std::ceil(mean + 5.0 * std::sqrt(mean))));
    }
    return std::min(m, top);
}

json config_json(const ScenarioConfig& c) {
    json propagators = json::array();
    for (auto p : c.run.propagators) {
        propagators.push_back(to_string(p));
    }
    json initial{{"kind", to_string(c.initial.kind)}};
    if (c.initial.kind == InitialKind::ground_coherent) {
        initial["mean_photons"] = c.initial.mean_photons;
    } else {
        initial["n_photons"] = c.initial.n_photons;
    }
    return json{
        {"name", c.name},
        {"params",
         {{"omega", c.params.omega},
          {"omega0", c.params.omega0},
          {"lambda_g", c.params.lambda_g},
          {"lambda_e", c.params.lambda_e},
          {"lambda_eg", c.params.lambda_eg},
          {"allow_signed_couplings", c.params.allow_signed_couplings}}},
        {"resonance",
         {{"n", c.resonance.n},
          {"delta_n", c.resonance.delta_n},
          {"omega0_explicit", c.omega0_explicit},
          {"window", c.resonance_window}}},
        {"initial", initial},
        {"run",
         {{"t_end_periods", c.run.t_end_periods},
          {"t_end_defaulted", c.run.t_end_defaulted},
          {"dt_periods", c.run.dt_periods},
          {"sample_every", c.run.sample_every},
          {"n_max", c.run.n_max},
          {"propagators", propagators},
          {"norm_bound", c.run.norm_bound}}},
        {"outputs",
         {{"csv", c.outputs.csv},
          {"rwa_csv", c.outputs.rwa_csv},
          {"manifest", c.outputs.manifest},
          {"spectrum", c.outputs.spectrum},
          {"spectrum_first", c.outputs.spectrum_first},
          {"spectrum_last", c.outputs.spectrum_last}}},
    };
}

RunManifest base_manifest(const ScenarioConfig& cfg) {
    RunManifest m;
    m.version = version();
    m.wall_clock_utc = utc_now();
    m.config = cfg;
    const auto& p = cfg.params;
    m.omega_eg = omega_eg(p);
    m.near_resonant = cfg.resonance.is_near_resonant(p.omega, cfg.resonance_window);
    m.driven_manifold = driven_manifold(cfg);
    m.coupling = coupling_element(p, m.driven_manifold, cfg.resonance.n);
    m.rabi = 2.0 * std::abs(m.coupling);
    m.rabi_period_periods = m.rabi > 0.0 ? p.omega / m.rabi : 0.0;
    m.rwa_warnings = rwa_validity_warnings(p, cfg.resonance, highest_relevant_manifold(cfg), cfg.resonance_window);
    return m;
}

} // namespace

std::string version() {
#ifdef GJC_VERSION
    return GJC_VERSION;
#else
    return "unknown";
#endif
}

std::string manifest_json(const RunManifest& m) {
    json doc{
        {"version", m.version},
        {"wall_clock_utc", m.wall_clock_utc},
        {"elapsed_seconds", m.elapsed_seconds},
        {"config", config_json(m.config)},
        {"derived",
         {{"omega_eg", m.omega_eg},
          {"delta_n", m.config.resonance.delta_n},
          {"driven_manifold", m.driven_manifold},
          {"V", m.coupling},
          {"Omega", m.rabi},
          {"rabi_period_periods", m.rabi_period_periods},
          {"dt_effective_periods", m.dt_effective_periods},
          {"steps", m.steps}}},
        {"validity",
         {{"status", m.status},
          {"error", m.error},
          {"valid", m.valid()},
          {"near_resonant", m.near_resonant},
          {"truncation_ok", m.truncation_ok},
          {"norm_ok", m.norm_ok},
          {"max_norm_drift", m.max_norm_drift},
          {"max_tail_population", m.max_tail_population},
          {"rwa_warnings", m.rwa_warnings},
          {"numeric_warnings", m.numeric_warnings}}},
        {"files", m.files},
    };
    return doc.dump(2) + "\n";
}

std::vector<double> sample_times(double t_end, double dt, std::size_t sample_every) {
    if (!(dt > 0.0) || !(t_end >= 0.0) || sample_every == 0) {
        throw std::invalid_argument("sample_times: need dt > 0, t_end >= 0, sample_every >= 1");
    }
    auto steps = static_cast<std::size_t>(std::llround(t_end / dt));
    if (steps == 0 && t_end > 0.0) {
        steps = 1;
    }
    const double step = steps > 0 ? t_end / static_cast<double>(steps) : dt;
    std::vector<double> out{0.0};
    for (std::size_t s = 1; s <= steps; ++s) {
        if (s % sample_every == 0 || s == steps) {
            out.push_back(static_cast<double>(s) * step);
        }
    }
    return out;
}

ScenarioResult simulate(const ScenarioConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    ScenarioResult res;
    res.manifest = base_manifest(cfg);
    auto& m = res.manifest;

    const auto& p = cfg.params;
    const double unit = period(p);
    const double t_end = cfg.run.t_end_periods * unit;
    const double dt = cfg.run.dt_periods * unit;

    try {
        const FockSpace space(cfg.run.n_max);
        const auto psi0 = prepare_initial(cfg.initial, p, space);

        if (cfg.run.uses(Propagator::numeric)) {
            NumericOptions opts;
            opts.norm_bound = cfg.run.norm_bound;
            auto num = evolve_numeric(build_full(p, space), psi0, t_end, dt, cfg.run.sample_every, opts);
            m.dt_effective_periods = num.dt_effective / unit;
            m.steps = num.steps;
            m.max_norm_drift = num.trajectory.max_norm_drift;
            m.norm_ok = m.max_norm_drift <= cfg.run.norm_bound;
            m.max_tail_population = num.trajectory.max_tail_population;
            m.truncation_ok = num.trajectory.truncation_ok;
            m.numeric_warnings = num.trajectory.warnings;
            res.numeric = std::move(num.trajectory);
        }
        if (cfg.run.uses(Propagator::rwa)) {
            const auto times = res.numeric ? res.numeric->times : sample_times(t_end, dt, cfg.run.sample_every);
            auto rwa = evolve_rwa(p, cfg.resonance, psi0, times);
            m.truncation_ok = m.truncation_ok && rwa.truncation_ok;
            m.max_tail_population = std::max(m.max_tail_population, rwa.max_tail_population);
            for (const auto& w : rwa.warnings) {
                if (std::find(m.rwa_warnings.begin(), m.rwa_warnings.end(), w) == m.rwa_warnings.end()) {
                    m.rwa_warnings.push_back(w);
                }
            }
            res.rwa = std::move(rwa);
        }
    } catch (const NumericalError& e) {
        m.status = "numerical_failure";
        m.error = e.what();
        m.norm_ok = false;
    } catch (const TruncationError& e) {
        m.status = "numerical_failure";
        m.error = e.what();
        m.truncation_ok = false;
    }
    m.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
}

std::filesystem::path resolve_output_dir(const ScenarioConfig& cfg) {
    if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') {
        return env;
    }
    return cfg.outputs.dir;
}

void ensure_writable(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
        throw IoError("cannot create output directory '" + dir.string() + "'" + (ec ? ": " + ec.message() : ""));
    }
    const auto probe = dir / ".gjc_write_probe";
    {
        std::ofstream out(probe, std::ios::binary);
        if (!out || !(out << "x")) {
            throw IoError("output directory '" + dir.string() + "' is not writable");
        }
    }
    std::filesystem::remove(probe, ec);
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot open '" + tmp.string() + "' for writing");
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw IoError("write to '" + tmp.string() + "' failed");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot move '" + tmp.string() + "' to '" + path.string() + "'");
    }
}

std::string format_double(double x) {
    char buf[40];
    const auto r = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    return std::string(buf, r.ptr);
}

std::string csv_text(const Trajectory& traj) {
    const auto cols = traj.photon_dist.cols();
    std::string out = "t_periods,W,norm,energy";
    for (Eigen::Index k = 0; k < cols; ++k) {
        out += ",P" + std::to_string(k);
    }
    out += '\n';
    for (std::size_t i = 0; i < traj.size(); ++i) {
        out += format_double(traj.t_periods(i));
        out += ',' + format_double(traj.inversion[i]);
        out += ',' + format_double(traj.norm[i]);
        out += ',' + format_double(traj.energy[i]);
        for (Eigen::Index k = 0; k < cols; ++k) {
            out += ',' + format_double(traj.photon_dist(static_cast<Eigen::Index>(i), k));
        }
        out += '\n';
    }
    return out;
}

void emit_csv(const Trajectory& traj, const std::filesystem::path& path) { write_atomic(path, csv_text(traj)); }

std::string spectrum_json(const ModelParams& params, const ResonanceSpec& spec, int first, int last,
                          const std::string& manifest_name) {
    json unmixed = json::array();
    for (int k = 0; k < spec.n; ++k) {
        unmixed.push_back({{"n_photons", k}, {"energy", displaced_energy(params, Spin::down, k)}});
    }
    json manifolds = json::array();
    for (const auto& r : spectrum_records(params, spec, first, last)) {
        manifolds.push_back({
            {"n_manifold", r.n_manifold},
            {"n", r.n},
            {"delta_n", r.delta_n},
            {"V", r.coupling},
            {"Omega", r.rabi},
            {"E_plus", r.e_plus},
            {"E_minus", r.e_minus},
            {"c_down", {r.c_down[0], r.c_down[1]}},
            {"c_up", {r.c_up[0], r.c_up[1]}},
            {"degenerate", r.degenerate},
        });
    }
    json doc{
        {"manifest", manifest_name},
        {"resonance", {{"n", spec.n}, {"delta_n", spec.delta_n}, {"omega_eg", omega_eg(params)}}},
        {"unmixed", unmixed},
        {"manifolds", manifolds},
    };
    return doc.dump(2) + "\n";
}

void emit_spectrum(const ModelParams& params, const ResonanceSpec& spec, int first, int last,
                   const std::filesystem::path& path, const std::string& manifest_name) {
    write_atomic(path, spectrum_json(params, spec, first, last, manifest_name));
}

ScenarioResult run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& out_dir) {
    ensure_writable(out_dir);
    auto res = simulate(cfg);
    auto& m = res.manifest;
    if (res.numeric) {
        emit_csv(*res.numeric, out_dir / cfg.outputs.csv);
        m.files.push_back(cfg.outputs.csv);
    }
    if (res.rwa) {
        emit_csv(*res.rwa, out_dir / cfg.outputs.rwa_csv);
        m.files.push_back(cfg.outputs.rwa_csv);
    }
    write_atomic(out_dir / cfg.outputs.manifest, manifest_json(m));
    return res;
}

std::string spectrum_manifest_name(const OutputSettings& out) {
    const std::filesystem::path base(out.manifest);
    return base.stem().string() + "_spectrum" + base.extension().string();
}

RunManifest run_spectrum(const ScenarioConfig& cfg, const std::filesystem::path& out_dir) {
    ensure_writable(out_dir);
    auto m = base_manifest(cfg);
    const auto manifest = spectrum_manifest_name(cfg.outputs);
    emit_spectrum(cfg.params, cfg.resonance, cfg.outputs.spectrum_first, cfg.outputs.spectrum_last,
                  out_dir / cfg.outputs.spectrum, manifest);
    m.files.push_back(cfg.outputs.spectrum);
    write_atomic(out_dir / manifest, manifest_json(m));
    return m;
}

} // namespace gjc
