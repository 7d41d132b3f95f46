#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include <json.hpp>

#include "gjc/config.hpp"
#include "gjc/scenario.hpp"

using namespace gjc;
namespace fs = std::filesystem;

namespace {

bool mentions(const ConfigError& e, const std::string& needle) {
    for (const auto& i : e.issues()) {
        if (i.find(needle) != std::string::npos) {
            return true;
        }
    }
    return false;
}

ConfigError expect_error(const std::string& text, const ConfigOverrides& ov = {}) {
    try {
        parse_config(text, ov);
    } catch (const ConfigError& e) {
        return e;
    }
    FAIL("expected a ConfigError for:\n" << text);
    return ConfigError({});
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path fresh_dir(const std::string& name) {
    const auto d = fs::temp_directory_path() / ("gjc_test_" + name);
    fs::remove_all(d);
    return d;
}

const char* kSmall = R"(
name: small
params: {lambda_e: 0.1, lambda_eg: 0.02}
resonance: {n: 2}
run: {t_end: 5, dt: 0.002, sample_every: 50, n_max: 20}
)";

struct EnvGuard {
    explicit EnvGuard(const char* value) { setenv(kOutputDirEnv, value, 1); }
    ~EnvGuard() { unsetenv(kOutputDirEnv); }
};

int run_cli(const std::string& args) {
    const std::string cmd = std::string(GJC_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST_CASE("minimal config resolves every default") {
    const auto cfg = parse_config("{n: 2, lambda_eg: 0.02, lambda_e: 0.1}");
    CHECK(cfg.params.omega == 1.0);
    CHECK(cfg.params.lambda_g == 0.0);
    CHECK(cfg.params.omega0 == doctest::Approx(2.01).epsilon(1e-15));
    CHECK(cfg.resonance.n == 2);
    CHECK(std::abs(cfg.resonance.delta_n) < 1e-12);
    CHECK_FALSE(cfg.omega0_explicit);
    CHECK(cfg.initial.kind == InitialKind::excited_fock);
    CHECK(cfg.initial.n_photons == 0);
    CHECK(cfg.run.dt_periods == 0.001);
    CHECK(cfg.run.n_max == 200);
    CHECK(cfg.run.sample_every == 100);
    CHECK(cfg.run.uses(Propagator::numeric));
    CHECK(cfg.run.uses(Propagator::rwa));
    CHECK(cfg.run.t_end_defaulted);
    CHECK(cfg.run.t_end_periods == doctest::Approx(3.0 / rabi_frequency(cfg.params, 2, 2)));
    CHECK(cfg.outputs.spectrum_last == 22);
    CHECK(cfg.name == "scenario");
}

TEST_CASE("sectioned and flat keys are equivalent") {
    const auto a = parse_config("{n: 3, lambda_e: 0.1, lambda_g: 0.1, lambda_eg: 0.02, t_end: 7, n_max: 40}");
    const auto b = parse_config(R"(
params: {lambda_e: 0.1, lambda_g: 0.1, lambda_eg: 0.02}
resonance: {n: 3}
run: {t_end: 7, n_max: 40}
)");
    CHECK(a.params.omega0 == b.params.omega0);
    CHECK(a.run.t_end_periods == 7.0);
    CHECK(b.run.n_max == 40);
}

TEST_CASE("config errors") {
    SUBCASE("n and omega0 are mutually exclusive") {
        const auto e = expect_error("{n: 2, omega0: 2.01, lambda_e: 0.1, lambda_eg: 0.02}");
        CHECK(mentions(e, "exactly one of 'n' and 'omega0'"));
    }
    SUBCASE("empty document lists the required keys") {
        const auto e = expect_error("");
        CHECK(e.issues().size() == 3);
        CHECK(mentions(e, "lambda_e'"));
        CHECK(mentions(e, "lambda_eg"));
        CHECK(mentions(e, "'n' or 'omega0'"));
    }
    SUBCASE("every violation is reported") {
        const auto e = expect_error(R"(
n: 0
lambda_e: -0.1
lambda_eg: 0.02
omega: 0
run: {dt: -1, n_max: 1, sample_every: 0, propagators: [numeric, exact]}
)");
        CHECK(mentions(e, "n must be >= 1"));
        CHECK(mentions(e, "lambda_e"));
        CHECK(mentions(e, "omega"));
        CHECK(mentions(e, "dt must be > 0"));
        CHECK(mentions(e, "n_max must be >= 2"));
        CHECK(mentions(e, "sample_every"));
        CHECK(mentions(e, "unknown propagator 'exact'"));
        CHECK(e.issues().size() >= 7);
    }
    SUBCASE("syntax errors carry the line") {
        const auto e = expect_error("n: 2\nlambda_e: [0.1, \nlambda_eg: 0.02\n");
        REQUIRE(e.issues().size() == 1);
        CHECK(e.issues()[0].rfind("line ", 0) == 0);
    }
    SUBCASE("type errors carry the line and key") {
        const auto e = expect_error("lambda_e: 0.1\nlambda_eg: 0.02\nn: two\n");
        CHECK(mentions(e, "line 3: key 'n'"));
    }
    SUBCASE("unknown and duplicated keys") {
        const auto e = expect_error(R"(
n: 2
lambda_e: 0.1
lambda_eg: 0.02
params: {lambda_e: 0.2, lambda_x: 1}
colour: blue
)");
        CHECK(mentions(e, "'lambda_e' given more than once"));
        CHECK(mentions(e, "unknown key 'params.lambda_x'"));
        CHECK(mentions(e, "unknown key 'colour'"));
    }
    SUBCASE("coherent state must fit the truncation") {
        const auto e = expect_error("{n: 2, lambda_e: 0.1, lambda_eg: 0.02, kind: ground_coherent, mean_photons: 60, n_max: 80}");
        CHECK(mentions(e, "cannot hold a coherent state"));
    }
    SUBCASE("signed couplings need the override") {
        const auto e = expect_error("{n: 3, lambda_g: -0.1, lambda_e: 0.1, lambda_eg: 0.02, t_end: 10}");
        CHECK(mentions(e, "lambda_g"));
        const auto cfg = parse_config(
            "{n: 3, lambda_g: -0.1, lambda_e: 0.1, lambda_eg: 0.02, t_end: 10, allow_signed_couplings: true}");
        CHECK(cfg.params.lambda_g == -0.1);
    }
    SUBCASE("vanishing Rabi frequency needs an explicit t_end") {
        const auto e = expect_error("{n: 3, lambda_e: 0.1, lambda_eg: 0.0}");
        CHECK(mentions(e, "t_end is required"));
    }
}

TEST_CASE("explicit omega0 picks the nearest resonance") {
    const auto cfg = parse_config("{omega0: 2.02, lambda_e: 0.1, lambda_eg: 0.02, t_end: 3}");
    CHECK(cfg.omega0_explicit);
    CHECK(cfg.params.omega0 == 2.02);
    CHECK(cfg.resonance.n == 2);
    CHECK(cfg.resonance.delta_n == doctest::Approx(0.01));
}

TEST_CASE("command-line overrides replace file values before validation") {
    ConfigOverrides ov;
    ov.dt_periods = 0.01;
    ov.n_max = 50;
    ov.t_end_periods = 2.5;
    const auto cfg = parse_config(kSmall, ov);
    CHECK(cfg.run.dt_periods == 0.01);
    CHECK(cfg.run.n_max == 50);
    CHECK(cfg.run.t_end_periods == 2.5);
    ov.n_max = 1;
    CHECK(mentions(expect_error(kSmall, ov), "n_max"));
}

TEST_CASE("load_config uses the file stem as default name") {
    const auto dir = fresh_dir("load");
    fs::create_directories(dir);
    std::ofstream(dir / "my_case.yaml") << "{n: 2, lambda_e: 0.1, lambda_eg: 0.02}";
    CHECK(load_config((dir / "my_case.yaml").string()).name == "my_case");
    CHECK_THROWS_AS(load_config((dir / "missing.yaml").string()), ConfigError);
}

TEST_CASE("sample_times follows the propagator grid") {
    const auto cfg = parse_config(kSmall);
    const auto res = simulate(cfg);
    REQUIRE(res.numeric);
    REQUIRE(res.rwa);
    const double unit = 2 * std::numbers::pi;
    const auto t = sample_times(cfg.run.t_end_periods * unit, cfg.run.dt_periods * unit, cfg.run.sample_every);
    CHECK(t == res.numeric->times);
    CHECK(t == res.rwa->times);
    CHECK(res.manifest.valid());
}

TEST_CASE("format_double round-trips") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 1000; ++k) {
        const double x = u(rng) * std::pow(10.0, static_cast<int>(u(rng) * 30));
        CHECK(std::strtod(format_double(x).c_str(), nullptr) == x);
    }
    CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("CSV layout") {
    SUBCASE("one sample gives header plus one row") {
        Trajectory t;
        t.times = {0.0};
        t.inversion = {1.0};
        t.norm = {1.0};
        t.energy = {2.5};
        t.photon_dist = Eigen::MatrixXd::Zero(1, 3);
        t.photon_dist(0, 0) = 1.0;
        const auto text = csv_text(t);
        CHECK(text == "t_periods,W,norm,energy,P0,P1,P2\n0,1,1,2.5,1,0,0\n");
    }

    SUBCASE("values round-trip and rows sum to the norm") {
        const auto res = simulate(parse_config(kSmall));
        const auto text = csv_text(*res.numeric);
        CHECK(text.find('\r') == std::string::npos);
        std::istringstream in(text);
        std::string line;
        std::getline(in, line);
        CHECK(line.rfind("t_periods,W,norm,energy,P0,", 0) == 0);
        CHECK(line.substr(line.rfind(',') + 1) == "P19");
        std::size_t row = 0;
        while (std::getline(in, line)) {
            std::vector<double> v;
            std::istringstream fields(line);
            std::string f;
            while (std::getline(fields, f, ',')) {
                v.push_back(std::strtod(f.c_str(), nullptr));
            }
            REQUIRE(v.size() == 24);
            const auto& tr = *res.numeric;
            CHECK(v[0] == tr.t_periods(row));
            CHECK(v[1] == tr.inversion[row]);
            CHECK(v[2] == tr.norm[row]);
            CHECK(v[3] == tr.energy[row]);
            double sum = 0.0;
            for (std::size_t k = 4; k < v.size(); ++k) {
                CHECK(v[k] == tr.photon_dist(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(k - 4)));
                sum += v[k];
            }
            CHECK(std::abs(sum - v[2]) < 1e-8);
            ++row;
        }
        CHECK(row == res.numeric->size());
    }
}

TEST_CASE("spectrum JSON") {
    ModelParams jc;
    jc.lambda_eg = 0.01;
    jc = tuned_to_resonance(jc, 1);
    const auto spec = resonance_spec(jc, 1);

    const auto doc = nlohmann::json::parse(spectrum_json(jc, spec, 1, 12, "m.json"));
    CHECK(doc["manifest"] == "m.json");
    CHECK(doc["unmixed"].size() == 1);
    const auto& ms = doc["manifolds"];
    REQUIRE(ms.size() == 12);
    const double omega1 = ms[0]["Omega"].get<double>();
    for (const auto& r : ms) {
        const int big_n = r["n_manifold"].get<int>();
        CHECK(r["Omega"].get<double>() / omega1 == doctest::Approx(std::sqrt(big_n)).epsilon(1e-12));
        // splitting around the crossing is the Rabi frequency
        CHECK(r["E_plus"].get<double>() - r["E_minus"].get<double>() ==
              doctest::Approx(r["Omega"].get<double>()).epsilon(1e-9));
        CHECK(r["c_down"].size() == 2);
    }

    const auto empty = nlohmann::json::parse(spectrum_json(jc, spec, 5, 4, ""));
    CHECK(empty["manifolds"].is_array());
    CHECK(empty["manifolds"].empty());
}

TEST_CASE("run_scenario writes deterministic files and a manifest") {
    const auto cfg = parse_config(kSmall);
    const auto a = fresh_dir("run_a");
    const auto b = fresh_dir("run_b");
    const auto ra = run_scenario(cfg, a);
    run_scenario(cfg, b);
    for (const char* f : {"trajectory.csv", "trajectory_rwa.csv"}) {
        REQUIRE(fs::exists(a / f));
        CHECK(slurp(a / f) == slurp(b / f));
    }
    for (const auto& e : fs::directory_iterator(a)) {
        CHECK(e.path().extension() != ".tmp");
    }
    const auto m = nlohmann::json::parse(slurp(a / "manifest.json"));
    CHECK(m["files"] == nlohmann::json::array({"trajectory.csv", "trajectory_rwa.csv"}));
    CHECK(m["config"]["params"]["lambda_e"] == 0.1);
    CHECK(m["config"]["params"]["omega0"].get<double>() == cfg.params.omega0);
    CHECK(m["derived"]["Omega"].get<double>() == rabi_frequency(cfg.params, 2, 2));
    CHECK(m["validity"]["valid"] == true);
    CHECK(ra.manifest.valid());

    const auto sm = run_spectrum(cfg, a);
    CHECK(fs::exists(a / "spectrum.json"));
    CHECK(fs::exists(a / "manifest_spectrum.json"));
    CHECK(sm.files == std::vector<std::string>{"spectrum.json"});
    CHECK(nlohmann::json::parse(slurp(a / "spectrum.json"))["manifest"] == "manifest_spectrum.json");
}

TEST_CASE("numerical failures are recorded, not thrown") {
    ConfigOverrides ov;
    auto cfg = parse_config(kSmall, ov);
    cfg.run.norm_bound = 1e-18;
    const auto res = simulate(cfg);
    CHECK_FALSE(res.manifest.valid());
    CHECK(res.manifest.status == "numerical_failure");
    CHECK(res.manifest.error.find("norm drift") != std::string::npos);
}

TEST_CASE("I/O failures") {
    const auto d = fresh_dir("io");
    fs::create_directories(d);
    std::ofstream(d / "plain") << "x";
    CHECK_THROWS_AS(ensure_writable(d / "plain" / "sub"), IoError);
    CHECK_THROWS_AS(write_atomic(d / "nodir" / "f.csv", "x"), IoError);
    write_atomic(d / "f.csv", "abc");
    CHECK(slurp(d / "f.csv") == "abc");
    CHECK_FALSE(fs::exists(d / "f.csv.tmp"));
}

TEST_CASE("output directory override") {
    const auto cfg = parse_config(kSmall);
    CHECK(resolve_output_dir(cfg) == fs::path("."));
    const EnvGuard env("/tmp/elsewhere");
    CHECK(resolve_output_dir(cfg) == fs::path("/tmp/elsewhere"));
}

TEST_CASE("CLI exit codes") {
    const auto d = fresh_dir("cli");
    fs::create_directories(d);
    std::ofstream(d / "good.yaml") << kSmall;
    std::ofstream(d / "bad.yaml") << "{n: 2}";
    std::ofstream(d / "strict.yaml") << kSmall << "\n" << "norm_bound: 1.0e-18\n";
    std::ofstream(d / "plain") << "x";
    const std::string dir = d.string();

    CHECK(run_cli("validate " + dir + "/good.yaml") == 0);
    CHECK(run_cli("validate " + dir + "/bad.yaml") == 1);
    CHECK(run_cli("validate " + dir + "/missing.yaml") == 1);
    CHECK(run_cli("frobnicate") == 1);
    CHECK(run_cli("validate " + dir + "/good.yaml --n-max 1") == 1);

    // outputs.dir defaults to the working directory
    CHECK(std::system(("cd " + dir + " && " + GJC_CLI_PATH + " run good.yaml --t-end 1 >/dev/null 2>&1").c_str()) == 0);
    CHECK(fs::exists(d / "trajectory.csv"));

    const std::string env = "GJC_OUTPUT_DIR=" + dir + "/out ";
    CHECK(std::system((env + GJC_CLI_PATH + " run " + dir + "/good.yaml >/dev/null 2>&1").c_str()) == 0);
    CHECK(fs::exists(d / "out" / "trajectory.csv"));

    const std::string strict = "GJC_OUTPUT_DIR=" + dir + "/strict_out " + GJC_CLI_PATH + " run " + dir +
                               "/strict.yaml >/dev/null 2>&1";
    const int s = std::system(strict.c_str());
    CHECK((WIFEXITED(s) ? WEXITSTATUS(s) : -1) == 2);
    CHECK(fs::exists(d / "strict_out" / "manifest.json"));

    const std::string io = "GJC_OUTPUT_DIR=" + dir + "/plain/sub " + GJC_CLI_PATH + " run " + dir +
                           "/good.yaml >/dev/null 2>&1";
    const int i = std::system(io.c_str());
    CHECK((WIFEXITED(i) ? WEXITSTATUS(i) : -1) == 3);

    CHECK(std::system((env + GJC_CLI_PATH + " spectrum " + dir + "/good.yaml >/dev/null 2>&1").c_str()) == 0);
    CHECK(fs::exists(d / "out" / "spectrum.json"));

    // sweep: one directory per scenario
    std::ofstream(d / "other.yaml") << "{name: other, n: 1, lambda_e: 0.0, lambda_eg: 0.01, t_end: 1, n_max: 12}";
    const std::string sweep = "GJC_OUTPUT_DIR=" + dir + "/sweep " + GJC_CLI_PATH + " sweep '" + dir +
                              "/[go]*.yaml' -j 2 >/dev/null 2>&1";
    CHECK(std::system(sweep.c_str()) == 0);
    CHECK(fs::exists(d / "sweep" / "small" / "trajectory.csv"));
    CHECK(fs::exists(d / "sweep" / "other" / "trajectory.csv"));
    CHECK(run_cli("sweep '" + dir + "/*.yaml'") == 1);  // bad.yaml stops the batch before any run
}
