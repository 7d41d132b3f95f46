// scenario.hpp: runs a parsed scenario and writes its data files.
//
// Files written into the output directory:
//   <csv>, <rwa_csv>   t_periods,W,norm,energy,P0..P{n_max-1}; 17 significant
//                      digits, LF line endings
//   <spectrum>         dressed-state records as JSON
//   <manifest>         resolved parameters, derived quantities, validity
//                      flags and the list of data files it describes
// Every file is written to a temporary name and renamed into place.

#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gjc/config.hpp"
#include "gjc/dynamics.hpp"

namespace gjc {

/// Environment variable that replaces outputs.dir.
inline constexpr const char* kOutputDirEnv = "GJC_OUTPUT_DIR";

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunManifest {
    std::string version;
    std::string wall_clock_utc;
    double elapsed_seconds{0.0};
    ScenarioConfig config;

    // derived
    double omega_eg{0.0};
    int driven_manifold{0};
    double coupling{0.0};  // V of the driven manifold
    double rabi{0.0};
    double rabi_period_periods{0.0};
    double dt_effective_periods{0.0};
    std::size_t steps{0};

    // validity
    std::string status{"ok"};  // ok | numerical_failure
    std::string error;
    bool near_resonant{true};
    bool truncation_ok{true};
    bool norm_ok{true};
    double max_norm_drift{0.0};
    double max_tail_population{0.0};
    std::vector<std::string> rwa_warnings;
    std::vector<std::string> numeric_warnings;

    std::vector<std::string> files;

    bool valid() const { return status == "ok" && truncation_ok && norm_ok; }
};

std::string manifest_json(const RunManifest& m);

struct ScenarioResult {
    std::optional<Trajectory> numeric;
    std::optional<Trajectory> rwa;
    RunManifest manifest;
};

/// Sample times of a run: every sample_every steps of the adjusted step and
/// the final time, in model time units.
std::vector<double> sample_times(double t_end, double dt, std::size_t sample_every);

/// Runs the requested propagators without touching the file system. A
/// NumericalError or TruncationError is recorded in the manifest status
/// instead of escaping.
ScenarioResult simulate(const ScenarioConfig& cfg);

/// outputs.dir, or the value of GJC_OUTPUT_DIR when set.
std::filesystem::path resolve_output_dir(const ScenarioConfig& cfg);

/// Checks that `dir` exists or can be created and accepts files.
void ensure_writable(const std::filesystem::path& dir);

/// ensure_writable, simulate, then write the trajectory CSVs and the manifest.
ScenarioResult run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& out_dir);

/// Manifest file of a spectrum export: "<manifest stem>_spectrum<ext>".
std::string spectrum_manifest_name(const OutputSettings& out);

/// Writes the spectrum JSON and its own manifest.
RunManifest run_spectrum(const ScenarioConfig& cfg, const std::filesystem::path& out_dir);

std::string format_double(double x);
std::string csv_text(const Trajectory& traj);
void emit_csv(const Trajectory& traj, const std::filesystem::path& path);

std::string spectrum_json(const ModelParams& params, const ResonanceSpec& spec, int first, int last,
                          const std::string& manifest_name);
void emit_spectrum(const ModelParams& params, const ResonanceSpec& spec, int first, int last,
                   const std::filesystem::path& path, const std::string& manifest_name = "");

/// Writes `content` to a sibling temporary file and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

std::string version();

} // namespace gjc
