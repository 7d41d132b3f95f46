// config.hpp: declarative scenario files.
//
// A scenario is a YAML mapping. Keys may be grouped into sections or given
// flat at top level; the leaf names are unique across sections:
//
//   name: two_photon_vacuum
//   params:    {omega: 1, lambda_g: 0, lambda_e: 0.1, lambda_eg: 0.02,
//               allow_signed_couplings: false}
//   resonance: {n: 2}                  # or {omega0: 2.01, n: 2}
//   initial:   {kind: excited_fock, n_photons: 0}
//              # or {kind: ground_coherent, mean_photons: 20}
//   run:       {t_end: 600, dt: 0.001, sample_every: 100, n_max: 200,
//               propagators: [numeric, rwa], norm_bound: 1e-6}
//   outputs:   {dir: out, csv: trajectory.csv, rwa_csv: trajectory_rwa.csv,
//               manifest: manifest.json, spectrum: spectrum.json,
//               spectrum_first: 0, spectrum_last: 20}
//
// Times (t_end, dt) are in oscillator periods T = 2π/ω.

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gjc/dynamics.hpp"
#include "gjc/model.hpp"
#include "gjc/rwa.hpp"

namespace gjc {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> issues);
    const std::vector<std::string>& issues() const noexcept { return issues_; }

private:
    std::vector<std::string> issues_;
};

enum class Propagator { numeric, rwa };

struct RunSettings {
    double t_end_periods{0.0};
    bool t_end_defaulted{false};  // three Rabi periods of the initially driven manifold
    double dt_periods{0.001};
    std::size_t sample_every{100};
    std::size_t n_max{200};
    std::vector<Propagator> propagators{Propagator::numeric, Propagator::rwa};
    double norm_bound{1e-6};

    bool uses(Propagator p) const;
};

struct OutputSettings {
    std::string dir{"."};
    std::string csv{"trajectory.csv"};
    std::string rwa_csv{"trajectory_rwa.csv"};
    std::string manifest{"manifest.json"};
    std::string spectrum{"spectrum.json"};
    int spectrum_first{0};
    int spectrum_last{-1};  // resolved to n + 20 when absent
};

struct ScenarioConfig {
    std::string name{"scenario"};
    ModelParams params;              // omega0 resolved
    ResonanceSpec resonance;
    bool omega0_explicit{false};
    double resonance_window{kDefaultResonanceWindow};
    InitialStateSpec initial;
    RunSettings run;
    OutputSettings outputs;
};

/// Command-line values that replace the file's.
struct ConfigOverrides {
    std::optional<double> dt_periods;
    std::optional<std::size_t> n_max;
    std::optional<double> t_end_periods;
};

/// Parses and validates a scenario document. Every violated constraint is
/// collected into one ConfigError; YAML syntax errors carry the line number.
/// `default_name` is used when the document has no name key.
ScenarioConfig parse_config(const std::string& text, const ConfigOverrides& overrides = {},
                            const std::string& default_name = "scenario");

/// Reads a file and parses it; the scenario name defaults to the file stem.
/// An unreadable file is a ConfigError.
ScenarioConfig load_config(const std::string& path, const ConfigOverrides& overrides = {});

/// Photon manifold whose Rabi frequency sets the default run length.
int driven_manifold(const ScenarioConfig& cfg);

std::string to_string(Propagator p);
std::string to_string(InitialKind k);

} // namespace gjc
