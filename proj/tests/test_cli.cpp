// End-to-end checks of the command-line tool: exit codes, artifact layout,
// export/import round trips, and manifest-based replay determinism.
#include "quadctrl/io.hpp"
#include "quadctrl/scenarios.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace quadctrl;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("quadctrl_cli_" + std::to_string(std::rand()) + std::to_string(std::rand()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

int run_cli(const std::string& args) {
    const std::string cmd = std::string(QUADCTRL_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("analyze reports the rank of an exported system") {
    TempDir tmp;
    write_json_file(tmp.path / "two_mode.json",
                    system_to_json(make_scenario("two_mode_chain").system));
    const fs::path out = tmp.path / "out";
    CHECK(run_cli("analyze --input " + (tmp.path / "two_mode.json").string() + " --out " +
                  out.string()) == 0);
    const Json report = read_json_file(out / "report.json");
    CHECK(report["kalman"]["numerical_rank"] == 4);
    CHECK(report["kalman"]["controllable"] == true);
    const Json manifest = read_json_file(out / "manifest.json");
    CHECK(manifest["command"] == "analyze");
    CHECK(manifest["results"]["numerical_rank"] == 4);
}

TEST_CASE("analyze of a Hamiltonian adds normal-mode and chain diagnostics") {
    TempDir tmp;
    Json h;
    h["n_modes"] = 2;
    h["G_re"] = {{1.0, 0.4}, {0.4, 1.7}};
    h["G_im"] = {{0.0, 0.0}, {0.0, 0.0}};
    h["B_re"] = {{0.0, 0.1}, {0.1, 0.0}};
    h["B_im"] = {{0.0, 0.0}, {0.0, 0.0}};
    h["driven_modes"] = {0};
    write_json_file(tmp.path / "chain.json", h);
    const fs::path out = tmp.path / "out";
    CHECK(run_cli("analyze --input " + (tmp.path / "chain.json").string() + " --out " +
                  out.string()) == 0);
    const Json report = read_json_file(out / "report.json");
    CHECK(report.contains("normal_modes"));
    CHECK(report.contains("chain_criterion"));
    CHECK(report["chain_criterion"]["satisfied"] == true);
}

TEST_CASE("synthesize refuses uncontrollable systems with exit code 3") {
    TempDir tmp;
    Json sys;
    sys["A_re"] = {{0.0, 0.0}, {0.0, 0.0}};
    sys["A_im"] = {{0.0, 0.0}, {0.0, 0.0}};
    sys["C_re"] = {{1.0}, {0.0}};
    sys["C_im"] = {{0.0}, {0.0}};
    sys["basis"] = "custom";
    write_json_file(tmp.path / "dead.json", sys);
    const fs::path out = tmp.path / "out";
    CHECK(run_cli("synthesize --input " + (tmp.path / "dead.json").string() +
                  " --goal [1,1] --out " + out.string()) == 3);
    const Json err = read_json_file(out / "error.json");
    CHECK(err["error"] == "not_controllable");
    CHECK(err["detail"]["numerical_rank"] == 1);
}

TEST_CASE("synthesize writes a pulse that reaches the goal") {
    TempDir tmp;
    write_json_file(tmp.path / "ecd.json", system_to_json(make_scenario("ecd").system));
    const fs::path out = tmp.path / "out";
    CHECK(run_cli("synthesize --input " + (tmp.path / "ecd.json").string() +
                  " --goal \"[[1.5,0],[-1.5,0]]\" --T 1 --out " + out.string()) == 0);
    CHECK(fs::exists(out / "pulse.csv"));
    const Json meta = read_json_file(out / "pulse_meta.json");
    CHECK(meta["endpoint_error"].get<double>() < 1e-6);
    const Json manifest = read_json_file(out / "manifest.json");
    CHECK(manifest["results"]["endpoint_error"].get<double>() < 1e-6);
}

TEST_CASE("invalid input exits with code 2") {
    TempDir tmp;
    std::ofstream(tmp.path / "broken.json") << "{ not json";
    CHECK(run_cli("analyze --input " + (tmp.path / "broken.json").string() + " --out " +
                  (tmp.path / "out").string()) == 2);
    CHECK(run_cli("bogus-subcommand") == 2);
}

TEST_CASE("scenario export re-imports bit-identically") {
    TempDir tmp;
    const fs::path out = tmp.path / "out";
    CHECK(run_cli("scenario ecd --out " + out.string()) == 0);
    const LinearControlSystem reloaded = load_system_file(out / "system.json");
    const LinearControlSystem original = make_scenario("ecd").system;
    CHECK(max_abs(Matrix(reloaded.a - original.a)) == 0.0);
    CHECK(max_abs(Matrix(reloaded.c - original.c)) == 0.0);
    CHECK(reloaded.basis_tag == original.basis_tag);
    CHECK(fs::exists(out / "pulse.csv"));
    CHECK(fs::exists(out / "fig_quadratures.csv"));
}

TEST_CASE("identical invocations replay to identical artifacts") {
    TempDir tmp;
    const fs::path out1 = tmp.path / "a";
    const fs::path out2 = tmp.path / "b";
    CHECK(run_cli("scenario wavepacket --out " + out1.string()) == 0);
    CHECK(run_cli("scenario wavepacket --out " + out2.string()) == 0);
    CHECK(slurp(out1 / "pulse_bump.csv") == slurp(out2 / "pulse_bump.csv"));
    CHECK(slurp(out1 / "pulse_mineffort.csv") == slurp(out2 / "pulse_mineffort.csv"));

    Json m1 = read_json_file(out1 / "manifest.json");
    Json m2 = read_json_file(out2 / "manifest.json");
    // Timing and output paths differ; the replayable content must not.
    m1.erase("timing_seconds");
    m2.erase("timing_seconds");
    m1["inputs"].erase("out");
    m2["inputs"].erase("out");
    m1.erase("argv");
    m2.erase("argv");
    CHECK(m1 == m2);
}

TEST_CASE("lqr command solves the boundary problem and reports residuals") {
    TempDir tmp;
    write_json_file(tmp.path / "two_mode.json",
                    system_to_json(make_scenario("two_mode_chain").system));
    const fs::path out = tmp.path / "out";
    CHECK(run_cli("lqr --input " + (tmp.path / "two_mode.json").string() +
                  " --goal [1,2,3,4] --T 1 --q 1 --r 1 --out " + out.string()) == 0);
    const Json manifest = read_json_file(out / "manifest.json");
    CHECK(manifest["results"]["endpoint_error"].get<double>() < 1e-6);
    CHECK(manifest["results"]["pontryagin_residual"].get<double>() < 1e-8);
    CHECK(fs::exists(out / "control.csv"));
    CHECK(fs::exists(out / "trajectory.csv"));
}
