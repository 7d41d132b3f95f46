#include "gjc/config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace gjc {

namespace {

const std::map<std::string, std::vector<std::string>>& sections() {
    static const std::map<std::string, std::vector<std::string>> s{
        {"params", {"omega", "lambda_g", "lambda_e", "lambda_eg", "allow_signed_couplings"}},
        {"resonance", {"n", "omega0", "window"}},
        {"initial", {"kind", "n_photons", "mean_photons"}},
        {"run", {"t_end", "dt", "sample_every", "n_max", "propagators", "norm_bound"}},
        {"outputs", {"dir", "csv", "rwa_csv", "manifest", "spectrum", "spectrum_first", "spectrum_last"}},
    };
    return s;
}

std::string section_of(const std::string& key) {
    for (const auto& [name, keys] : sections()) {
        if (std::find(keys.begin(), keys.end(), key) != keys.end()) {
            return name;
        }
    }
    return {};
}

std::string where(const YAML::Node& node) {
    const auto m = node.Mark();
    if (m.is_null()) {
        return {};
    }
    return "line " + std::to_string(m.line + 1) + ": ";
}

class Reader {
public:
    std::vector<std::string> issues;

    void collect(const YAML::Node& root) {
        if (!root || root.IsNull()) {
            return;
        }
        if (!root.IsMap()) {
            issues.push_back(where(root) + "scenario document must be a mapping");
            return;
        }
        for (const auto& kv : root) {
            const auto key = kv.first.as<std::string>();
            if (key == "name") {
                name_ = kv.second;
                continue;
            }
            const auto sec = sections().find(key);
            if (sec != sections().end()) {
                if (!kv.second.IsMap()) {
                    issues.push_back(where(kv.first) + "section '" + key + "' must be a mapping");
                    continue;
                }
                for (const auto& inner : kv.second) {
                    const auto leaf = inner.first.as<std::string>();
                    if (section_of(leaf) != key) {
                        issues.push_back(where(inner.first) + "unknown key '" + key + "." + leaf + "'");
                        continue;
                    }
                    put(leaf, inner.first, inner.second);
                }
                continue;
            }
            if (section_of(key).empty()) {
                issues.push_back(where(kv.first) + "unknown key '" + key + "'");
                continue;
            }
            put(key, kv.first, kv.second);
        }
    }

    bool has(const std::string& key) const { return leaves_.count(key) != 0; }

    template <class T>
    std::optional<T> get(const std::string& key, const char* expected) {
        const auto it = leaves_.find(key);
        if (it == leaves_.end()) {
            return std::nullopt;
        }
        try {
            if (!it->second.IsScalar()) {
                throw YAML::BadConversion(it->second.Mark());
            }
            return it->second.as<T>();
        } catch (const YAML::Exception&) {
            issues.push_back(where(it->second) + "key '" + key + "': expected " + expected);
            return std::nullopt;
        }
    }

    std::optional<std::vector<std::string>> get_list(const std::string& key) {
        const auto it = leaves_.find(key);
        if (it == leaves_.end()) {
            return std::nullopt;
        }
        try {
            return it->second.as<std::vector<std::string>>();
        } catch (const YAML::Exception&) {
            issues.push_back(where(it->second) + "key '" + key + "': expected a list of names");
            return std::nullopt;
        }
    }

    std::optional<std::string> name() {
        if (!name_ || name_.IsNull()) {
            return std::nullopt;
        }
        try {
            return name_.as<std::string>();
        } catch (const YAML::Exception&) {
            issues.push_back(where(name_) + "key 'name': expected a string");
            return std::nullopt;
        }
    }

private:
    void put(const std::string& key, const YAML::Node& key_node, const YAML::Node& value) {
        if (leaves_.count(key) != 0) {
            issues.push_back(where(key_node) + "key '" + key + "' given more than once");
            return;
        }
        leaves_.emplace(key, value);
    }

    std::map<std::string, YAML::Node> leaves_;
    YAML::Node name_;
};

void check_file_name(const std::string& key, const std::string& value, std::vector<std::string>& issues) {
    if (value.empty()) {
        issues.push_back("outputs." + key + " must not be empty");
    } else if (value.find('/') != std::string::npos) {
        issues.push_back("outputs." + key + " must be a file name inside outputs.dir, got '" + value + "'");
    }
}

} // namespace

ConfigError::ConfigError(std::vector<std::string> issues)
    : std::runtime_error([&] {
          std::string msg = "invalid scenario configuration:";
          for (const auto& i : issues) {
              msg += "\n  - " + i;
          }
          return msg;
      }()),
      issues_(std::move(issues)) {}

bool RunSettings::uses(Propagator p) const {
    return std::find(propagators.begin(), propagators.end(), p) != propagators.end();
}

std::string to_string(Propagator p) { return p == Propagator::numeric ? "numeric" : "rwa"; }

std::string to_string(InitialKind k) {
    switch (k) {
    case InitialKind::excited_fock:
        return "excited_fock";
    case InitialKind::ground_coherent:
        return "ground_coherent";
    case InitialKind::custom_vector:
        return "custom_vector";
    }
    return "unknown";
}

int driven_manifold(const ScenarioConfig& cfg) {
    const int n = cfg.resonance.n;
    if (cfg.initial.kind == InitialKind::ground_coherent) {
        return std::max(n, static_cast<int>(std::llround(cfg.initial.mean_photons)));
    }
    return static_cast<int>(cfg.initial.n_photons) + n;
}

ScenarioConfig parse_config(const std::string& text, const ConfigOverrides& overrides,
                            const std::string& default_name) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError({"line " + std::to_string(e.mark.line + 1) + ", column " + std::to_string(e.mark.column + 1) +
                           ": " + e.msg});
    }

    Reader r;
    r.collect(root);
    auto& issues = r.issues;
    ScenarioConfig cfg;
    cfg.name = default_name;

    if (auto v = r.name()) {
        cfg.name = *v;
        if (cfg.name.empty() || cfg.name.find('/') != std::string::npos) {
            issues.push_back("name must be a non-empty string without '/'");
        }
    }

    // model parameters
    auto& p = cfg.params;
    if (auto v = r.get<double>("omega", "a number")) p.omega = *v;
    if (auto v = r.get<double>("lambda_g", "a number")) p.lambda_g = *v;
    if (auto v = r.get<bool>("allow_signed_couplings", "true or false")) p.allow_signed_couplings = *v;
    if (!r.has("lambda_e")) {
        issues.push_back("missing required key 'lambda_e'");
    } else if (auto v = r.get<double>("lambda_e", "a number")) {
        p.lambda_e = *v;
    }
    if (!r.has("lambda_eg")) {
        issues.push_back("missing required key 'lambda_eg'");
    } else if (auto v = r.get<double>("lambda_eg", "a number")) {
        p.lambda_eg = *v;
    }
    const auto param_issues = p.violations();
    issues.insert(issues.end(), param_issues.begin(), param_issues.end());
    const bool params_ok = param_issues.empty();

    // resonance
    const bool has_n = r.has("n");
    const bool has_omega0 = r.has("omega0");
    std::optional<int> n;
    double omega0 = 0.0;
    bool omega0_ok = false;
    if (has_n && has_omega0) {
        issues.push_back("give exactly one of 'n' and 'omega0', not both");
    } else if (!has_n && !has_omega0) {
        issues.push_back("missing required key: one of 'n' or 'omega0'");
    }
    if (has_n) {
        n = r.get<int>("n", "a positive integer");
        if (n && *n < 1) {
            issues.push_back("n must be >= 1, got " + std::to_string(*n));
            n.reset();
        }
    }
    if (has_omega0) {
        if (auto v = r.get<double>("omega0", "a number")) {
            omega0 = *v;
            omega0_ok = std::isfinite(omega0);
            if (!omega0_ok) {
                issues.push_back("omega0 must be finite");
            }
        }
    }
    if (auto v = r.get<double>("window", "a number")) {
        cfg.resonance_window = *v;
        if (!(*v > 0.0)) {
            issues.push_back("resonance window must be > 0");
        }
    }
    bool resonance_ok = false;
    if (params_ok && !(has_n && has_omega0)) {
        if (n) {
            p.omega0 = resonant_omega0(p, *n);
            cfg.resonance = resonance_spec(p, *n);
            resonance_ok = true;
        } else if (omega0_ok) {
            p.omega0 = omega0;
            cfg.omega0_explicit = true;
            const auto nearest = static_cast<int>(std::llround(omega_eg(p) / p.omega));
            if (nearest < 1) {
                issues.push_back("omega0 gives a shifted transition frequency below one photon; no resonance order");
            } else {
                cfg.resonance = resonance_spec(p, nearest);
                resonance_ok = true;
            }
        }
    }

    // run settings
    auto& run = cfg.run;
    if (auto v = r.get<double>("dt", "a number")) run.dt_periods = *v;
    if (auto v = r.get<double>("norm_bound", "a number")) run.norm_bound = *v;
    if (auto v = r.get<long long>("sample_every", "a positive integer")) {
        if (*v < 1) {
            issues.push_back("sample_every must be >= 1");
        } else {
            run.sample_every = static_cast<std::size_t>(*v);
        }
    }
    if (auto v = r.get<long long>("n_max", "an integer >= 2")) {
        if (*v < 2) {
            issues.push_back("n_max must be >= 2");
        } else {
            run.n_max = static_cast<std::size_t>(*v);
        }
    }
    std::optional<double> t_end = r.get<double>("t_end", "a number");
    if (auto v = r.get_list("propagators")) {
        run.propagators.clear();
        for (const auto& name : *v) {
            Propagator prop{};
            if (name == "numeric") {
                prop = Propagator::numeric;
            } else if (name == "rwa") {
                prop = Propagator::rwa;
            } else {
                issues.push_back("unknown propagator '" + name + "' (expected numeric or rwa)");
                continue;
            }
            if (run.uses(prop)) {
                issues.push_back("propagator '" + name + "' listed twice");
                continue;
            }
            run.propagators.push_back(prop);
        }
        if (v->empty()) {
            issues.push_back("propagators must name at least one of numeric, rwa");
        }
    }
    if (overrides.dt_periods) run.dt_periods = *overrides.dt_periods;
    if (overrides.n_max) run.n_max = *overrides.n_max;
    if (overrides.t_end_periods) t_end = overrides.t_end_periods;

    if (!(run.dt_periods > 0.0) || !std::isfinite(run.dt_periods)) {
        issues.push_back("dt must be > 0");
    }
    if (!(run.norm_bound > 0.0)) {
        issues.push_back("norm_bound must be > 0");
    }
    if (run.n_max < 2) {
        issues.push_back("n_max must be >= 2");
    }
    if (resonance_ok && static_cast<std::size_t>(cfg.resonance.n) >= run.n_max) {
        issues.push_back("resonance order n = " + std::to_string(cfg.resonance.n) + " does not fit below n_max");
    }

    // initial state
    auto& init = cfg.initial;
    if (auto v = r.get<std::string>("kind", "a string")) {
        if (*v == "excited_fock") {
            init.kind = InitialKind::excited_fock;
        } else if (*v == "ground_coherent") {
            init.kind = InitialKind::ground_coherent;
        } else {
            issues.push_back("unknown initial kind '" + *v + "' (expected excited_fock or ground_coherent)");
        }
    }
    if (auto v = r.get<long long>("n_photons", "a non-negative integer")) {
        if (*v < 0) {
            issues.push_back("n_photons must be >= 0");
        } else {
            init.n_photons = static_cast<std::size_t>(*v);
        }
    }
    if (auto v = r.get<double>("mean_photons", "a number")) {
        init.mean_photons = *v;
    }
    if (r.has("mean_photons") && init.kind != InitialKind::ground_coherent) {
        issues.push_back("mean_photons only applies to kind ground_coherent");
    }
    if (r.has("n_photons") && init.kind != InitialKind::excited_fock) {
        issues.push_back("n_photons only applies to kind excited_fock");
    }
    if (init.kind == InitialKind::excited_fock && init.n_photons >= run.n_max) {
        issues.push_back("n_photons = " + std::to_string(init.n_photons) + " is outside n_max");
    }
    if (init.kind == InitialKind::ground_coherent) {
        if (!(init.mean_photons >= 0.0) || !std::isfinite(init.mean_photons)) {
            issues.push_back("mean_photons must be >= 0");
        } else if (init.mean_photons + 5.0 * std::sqrt(init.mean_photons) > static_cast<double>(run.n_max)) {
            std::ostringstream msg;
            msg << "n_max = " << run.n_max << " cannot hold a coherent state with mean " << init.mean_photons
                << " (needs >= " << std::ceil(init.mean_photons + 5.0 * std::sqrt(init.mean_photons)) << ")";
            issues.push_back(msg.str());
        }
    }

    // outputs
    auto& out = cfg.outputs;
    if (auto v = r.get<std::string>("dir", "a path")) out.dir = *v;
    if (auto v = r.get<std::string>("csv", "a file name")) out.csv = *v;
    if (auto v = r.get<std::string>("rwa_csv", "a file name")) out.rwa_csv = *v;
    if (auto v = r.get<std::string>("manifest", "a file name")) out.manifest = *v;
    if (auto v = r.get<std::string>("spectrum", "a file name")) out.spectrum = *v;
    if (auto v = r.get<int>("spectrum_first", "an integer")) out.spectrum_first = *v;
    const auto last = r.get<int>("spectrum_last", "an integer");
    if (out.dir.empty()) {
        issues.push_back("outputs.dir must not be empty");
    }
    check_file_name("csv", out.csv, issues);
    check_file_name("rwa_csv", out.rwa_csv, issues);
    check_file_name("manifest", out.manifest, issues);
    check_file_name("spectrum", out.spectrum, issues);
    if (out.csv == out.rwa_csv) {
        issues.push_back("outputs.csv and outputs.rwa_csv must differ");
    }
    if (out.spectrum_first < 0) {
        issues.push_back("spectrum_first must be >= 0");
    }

    if (resonance_ok) {
        out.spectrum_last = last ? *last : cfg.resonance.n + 20;
    }

    // run length
    if (t_end) {
        run.t_end_periods = *t_end;
        if (!(*t_end > 0.0) || !std::isfinite(*t_end)) {
            issues.push_back("t_end must be > 0");
        }
    } else if (resonance_ok && issues.empty()) {
        const double rabi = rabi_frequency(p, driven_manifold(cfg), cfg.resonance.n);
        if (rabi == 0.0) {
            issues.push_back("t_end is required when the driven manifold has zero Rabi frequency");
        } else {
            run.t_end_periods = 3.0 * p.omega / rabi;
            run.t_end_defaulted = true;
        }
    }

    if (!issues.empty()) {
        throw ConfigError(std::move(issues));
    }
    return cfg;
}

ScenarioConfig load_config(const std::string& path, const ConfigOverrides& overrides) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError({"cannot read config file '" + path + "'"});
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), overrides, std::filesystem::path(path).stem().string());
}

} // namespace gjc
