// quadctrl command-line front end: controllability reports, pulse synthesis,
// trajectory simulation, boundary-value optimal control, weight sweeps,
// scenario reproductions, and Fock-space verification runs. Every command
// writes a manifest recording the resolved inputs, versions, timings, and
// headline results, sufficient to replay the run.

#include "quadctrl/controllability.hpp"
#include "quadctrl/dynamics.hpp"
#include "quadctrl/fock.hpp"
#include "quadctrl/io.hpp"
#include "quadctrl/lqr.hpp"
#include "quadctrl/model.hpp"
#include "quadctrl/scenarios.hpp"
#include "quadctrl/synthesis.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace quadctrl;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalidInput = 2;
constexpr int kExitNotControllable = 3;
constexpr int kExitNumericalFailure = 4;

struct CommonOptions {
    std::string input_path;
    std::string out_dir = "quadctrl_out";
    double horizon = 1.0;
    double tol = 1e-10;
    int grid = 501;
    int dim = 40;
    std::uint64_t seed = 12345;
    double q_weight = 1.0;
    double r_weight = 1.0;
    std::string method = "bump";
};

std::vector<std::string> g_argv;

fs::path ensure_out_dir(const CommonOptions& opts) {
    fs::path dir(opts.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw InvalidInputError("output directory '" + dir.string() + "' is not writable");
    }
    return dir;
}

Json base_manifest(const std::string& command, const CommonOptions& opts) {
    Json m;
    m["command"] = command;
    m["argv"] = g_argv;
    m["version"] = "0.1.0";
    m["eigen_version"] = std::to_string(EIGEN_WORLD_VERSION) + "." +
                         std::to_string(EIGEN_MAJOR_VERSION) + "." +
                         std::to_string(EIGEN_MINOR_VERSION);
    m["seed"] = opts.seed;
    Json in;
    if (!opts.input_path.empty()) in["input"] = opts.input_path;
    in["out"] = opts.out_dir;
    in["T"] = opts.horizon;
    in["tol"] = opts.tol;
    in["grid"] = opts.grid;
    in["dim"] = opts.dim;
    in["q"] = opts.q_weight;
    in["r"] = opts.r_weight;
    in["method"] = opts.method;
    m["inputs"] = std::move(in);
    return m;
}

void finish_manifest(Json& manifest, const fs::path& dir,
                     std::chrono::steady_clock::time_point started) {
    const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started);
    manifest["timing_seconds"] = elapsed.count();
    write_json_file(dir / "manifest.json", manifest);
}

void write_error_json(const CommonOptions& opts, const std::string& kind,
                      const std::string& message, const Json& extra = Json::object()) {
    try {
        const fs::path dir = ensure_out_dir(opts);
        Json err;
        err["error"] = kind;
        err["message"] = message;
        if (!extra.empty()) err["detail"] = extra;
        write_json_file(dir / "error.json", err);
    } catch (...) {
        // The error report is best-effort; the exit code still carries the outcome.
    }
}

std::vector<double> uniform_grid(double horizon, int samples) {
    std::vector<double> grid(static_cast<std::size_t>(std::max(2, samples)));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        grid[i] = horizon * static_cast<double>(i) / static_cast<double>(grid.size() - 1);
    }
    return grid;
}

// Boundary vectors accept either a flat numeric array (real entries) or an
// array of [re, im] pairs.
Vector parse_state_vector(const std::string& text, const std::string& what) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const std::exception& e) {
        throw InvalidInputError(what + ": not valid JSON: " + e.what());
    }
    if (!j.is_array() || j.empty()) throw InvalidInputError(what + ": expected a JSON array");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto& entry = j[i];
        if (entry.is_number()) {
            v(static_cast<Eigen::Index>(i)) = entry.get<double>();
        } else if (entry.is_array() && entry.size() == 2 && entry[0].is_number() &&
                   entry[1].is_number()) {
            v(static_cast<Eigen::Index>(i)) =
                Complex(entry[0].get<double>(), entry[1].get<double>());
        } else {
            throw InvalidInputError(what + ": entries must be numbers or [re, im] pairs");
        }
    }
    return v;
}

Json vector_to_json(const Vector& v) {
    Json arr = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back({v(i).real(), v(i).imag()});
    return arr;
}

// ---------------------------------------------------------------- analyze

int run_analyze(const CommonOptions& opts) {
    const auto started = std::chrono::steady_clock::now();
    const fs::path dir = ensure_out_dir(opts);
    const Json input = read_json_file(opts.input_path);

    Json manifest = base_manifest("analyze", opts);
    Json report;

    LinearControlSystem sys = [&] {
        if (input.contains("n_modes")) return control_system(hamiltonian_from_json(input));
        return system_from_json(input);
    }();
    const KalmanReport kr = analyze(sys);
    report["kalman"] = kalman_report_to_json(kr);

    if (input.contains("n_modes")) {
        const QuadraticHamiltonian h = hamiltonian_from_json(input);
        const SymplecticGenerator gen = build_generator(h);
        // Unit drive amplitudes on the masked modes give the overlap test
        // its reference direction.
        Vector c = Vector::Zero(2 * h.n_modes);
        for (int k = 0; k < h.n_modes; ++k) {
            if (h.drive_mask[static_cast<std::size_t>(k)]) {
                c(k) = 1.0;
                c(h.n_modes + k) = 1.0;
            }
        }
        report["normal_modes"] = normal_mode_report_to_json(normal_mode_analysis(gen, c));
        try {
            const ChainCriterionResult chain = chain_criterion(h);
            Json cj;
            cj["satisfied"] = chain.satisfied;
            Json pairs = Json::array();
            for (auto [i, j] : chain.failing_pairs) pairs.push_back({i, j});
            cj["failing_pairs"] = std::move(pairs);
            report["chain_criterion"] = std::move(cj);
        } catch (const InvalidInputError&) {
            // Not a nearest-neighbour chain; the report simply omits it.
        }
        report["system"] = hamiltonian_to_json(h);
    } else {
        report["system"] = system_to_json(sys);
    }

    write_json_file(dir / "report.json", report);
    manifest["results"]["numerical_rank"] = kr.numerical_rank;
    manifest["results"]["controllable"] = kr.controllable;
    finish_manifest(manifest, dir, started);

    std::cout << "rank " << kr.numerical_rank << "/" << sys.d()
              << (kr.controllable ? " (controllable)" : " (not controllable)") << "\n";
    return kExitOk;
}

// -------------------------------------------------------------- synthesize

int run_synthesize(const CommonOptions& opts, const std::string& x0_text,
                   const std::string& goal_text) {
    const auto started = std::chrono::steady_clock::now();
    const fs::path dir = ensure_out_dir(opts);
    const LinearControlSystem sys = load_system_file(opts.input_path);

    const Vector goal = parse_state_vector(goal_text, "--goal");
    Vector x0 = x0_text.empty() ? Vector(Vector::Zero(sys.d()))
                                : parse_state_vector(x0_text, "--x0");
    if (goal.size() != sys.d() || x0.size() != sys.d()) {
        throw InvalidInputError("boundary vectors must have dimension " +
                                std::to_string(sys.d()));
    }

    Json manifest = base_manifest("synthesize", opts);
    manifest["inputs"]["x0"] = vector_to_json(x0);
    manifest["inputs"]["goal"] = vector_to_json(goal);

    ControlPulse pulse;
    Json meta;
    if (opts.method == "bump") {
        const int order = static_cast<int>(sys.d());
        pulse = synthesize_pulse(sys, x0, goal, opts.horizon, polynomial_bump(order, opts.horizon));
        meta["bump_order"] = order;
    } else if (opts.method == "mineffort") {
        const MinEffortPulse me = min_effort_pulse(sys, x0, goal, opts.horizon);
        pulse = me.pulse;
        meta["predicted_cost"] = me.predicted_cost;
        meta["grammian_condition"] = me.grammian_condition;
    } else {
        throw InvalidInputError("synthesize supports --method bump|mineffort");
    }

    const Trajectory traj = propagate(sys, pulse, x0, opts.horizon,
                                      {.rel_tol = opts.tol, .abs_tol = opts.tol * 1e-2});
    const double endpoint_error = (traj.final_state() - goal).norm();

    write_pulse_csv(dir / "pulse.csv", pulse, uniform_grid(opts.horizon, opts.grid));
    meta["provenance"] = to_string(pulse.provenance());
    meta["horizon"] = opts.horizon;
    meta["controls"] = pulse.controls();
    meta["endpoint_error"] = endpoint_error;
    write_json_file(dir / "pulse_meta.json", meta);

    manifest["results"]["endpoint_error"] = endpoint_error;
    manifest["results"]["max_amplitude"] = pulse.max_abs_on_grid(opts.grid);
    finish_manifest(manifest, dir, started);
    std::cout << "pulse written; endpoint error " << endpoint_error << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------- simulate

int run_simulate(const CommonOptions& opts, const std::string& x0_text,
                 const std::string& goal_text) {
    const auto started = std::chrono::steady_clock::now();
    const fs::path dir = ensure_out_dir(opts);
    const LinearControlSystem sys = load_system_file(opts.input_path);

    Vector x0 = x0_text.empty() ? Vector(Vector::Zero(sys.d()))
                                : parse_state_vector(x0_text, "--x0");
    Json manifest = base_manifest("simulate", opts);
    manifest["inputs"]["x0"] = vector_to_json(x0);

    PropagateOptions popts;
    popts.rel_tol = opts.tol;
    popts.abs_tol = opts.tol * 1e-2;
    popts.grid_samples = opts.grid;

    Trajectory traj;
    if (goal_text.empty()) {
        traj = propagate_free(sys, x0, opts.horizon, popts);
    } else {
        const Vector goal = parse_state_vector(goal_text, "--goal");
        ControlPulse pulse;
        if (opts.method == "bump") {
            pulse = synthesize_pulse(sys, x0, goal, opts.horizon,
                                     polynomial_bump(static_cast<int>(sys.d()), opts.horizon));
        } else if (opts.method == "mineffort") {
            pulse = min_effort_pulse(sys, x0, goal, opts.horizon).pulse;
        } else {
            throw InvalidInputError("simulate supports --method bump|mineffort");
        }
        traj = propagate(sys, pulse, x0, opts.horizon, popts);
        manifest["inputs"]["goal"] = vector_to_json(goal);
        manifest["results"]["endpoint_error"] = (traj.final_state() - goal).norm();
        const Eigen::Index d = sys.d();
        const Eigen::Index m = sys.m();
        manifest["results"]["control_effort"] =
            evaluate_cost(traj, RealMatrix::Zero(d, d), RealMatrix::Identity(m, m), false);
    }

    write_trajectory_csv(dir / "trajectory.csv", traj);
    manifest["results"]["final_state"] = vector_to_json(traj.final_state());
    finish_manifest(manifest, dir, started);
    std::cout << "trajectory written (" << traj.times.size() << " samples)\n";
    return kExitOk;
}

// -------------------------------------------------------------------- lqr

LQRProblem lqr_problem_from_options(const CommonOptions& opts, const std::string& x0_text,
                                    const std::string& goal_text, bool* embedded = nullptr) {
    LinearControlSystem sys = load_system_file(opts.input_path);
    Vector goal = parse_state_vector(goal_text, "--goal");
    Vector x0 = x0_text.empty() ? Vector(Vector::Zero(sys.d()))
                                : parse_state_vector(x0_text, "--x0");
    if (goal.size() != sys.d() || x0.size() != sys.d()) {
        throw InvalidInputError("boundary vectors must have dimension " +
                                std::to_string(sys.d()));
    }
    // Complex systems go through the standard real embedding; the solve then
    // runs on (Re x, Im x).
    const bool needs_embedding = !sys.is_real() ||
                                 max_abs(Matrix(x0.imag().cast<Complex>())) > 0.0 ||
                                 max_abs(Matrix(goal.imag().cast<Complex>())) > 0.0;
    if (embedded) *embedded = needs_embedding;
    if (needs_embedding) {
        x0 = embed_complex_vector(x0).cast<Complex>();
        goal = embed_complex_vector(goal).cast<Complex>();
        sys = complex_to_real_embedding(sys);
    }
    const Eigen::Index d = sys.d();
    const Eigen::Index m = sys.m();
    return LQRProblem::create(sys, opts.q_weight * RealMatrix::Identity(d, d),
                              opts.r_weight * RealMatrix::Identity(m, m), x0.real(), goal.real(),
                              opts.horizon);
}

int run_lqr(const CommonOptions& opts, const std::string& x0_text, const std::string& goal_text) {
    const auto started = std::chrono::steady_clock::now();
    const fs::path dir = ensure_out_dir(opts);

    Json manifest = base_manifest("lqr", opts);
    bool embedded = false;
    const LQRProblem problem = lqr_problem_from_options(opts, x0_text, goal_text, &embedded);
    manifest["inputs"]["real_embedding"] = embedded;
    const LQRSolution sol = solve_bvp(problem);
    const PontryaginResiduals residuals = pontryagin_residuals(problem, sol);

    write_pulse_csv(dir / "control.csv", sol.control, uniform_grid(opts.horizon, opts.grid));
    write_trajectory_csv(dir / "trajectory.csv", sol.trajectory);

    manifest["results"]["cost"] = sol.cost;
    manifest["results"]["endpoint_error"] =
        (sol.trajectory.final_state() - problem.x_target.cast<Complex>()).norm();
    manifest["results"]["bvp_condition"] = sol.bvp_condition;
    manifest["results"]["segments"] = sol.segments;
    manifest["results"]["pontryagin_residual"] = residuals.max();
    Json lam = Json::array();
    for (Eigen::Index i = 0; i < sol.lambda0.size(); ++i) lam.push_back(sol.lambda0(i));
    manifest["results"]["lambda0"] = std::move(lam);
    finish_manifest(manifest, dir, started);
    std::cout << "cost " << sol.cost << ", residual " << residuals.max() << "\n";
    return kExitOk;
}

// ------------------------------------------------------------------ sweep

int run_sweep(const CommonOptions& opts, const std::string& x0_text, const std::string& goal_text,
              double q_min, double q_max, int q_count) {
    const auto started = std::chrono::steady_clock::now();
    const fs::path dir = ensure_out_dir(opts);
    if (!(q_min > 0.0) || !(q_max >= q_min) || q_count < 1) {
        throw InvalidInputError("sweep requires 0 < q-min <= q-max and q-count >= 1");
    }

    Json manifest = base_manifest("sweep", opts);
    manifest["inputs"]["q_min"] = q_min;
    manifest["inputs"]["q_max"] = q_max;
    manifest["inputs"]["q_count"] = q_count;

    std::vector<double> qs(static_cast<std::size_t>(q_count));
    for (int i = 0; i < q_count; ++i) {
        const double f = q_count == 1 ? 0.0 : static_cast<double>(i) / (q_count - 1);
        qs[static_cast<std::size_t>(i)] =
            std::exp(std::log(q_min) + f * (std::log(q_max) - std::log(q_min)));
    }

    bool embedded = false;
    const LQRProblem problem = lqr_problem_from_options(opts, x0_text, goal_text, &embedded);
    manifest["inputs"]["real_embedding"] = embedded;
    const auto points = weight_sweep(problem, qs);
    write_sweep_csv(dir / "sweep.csv", points);
    write_json_file(dir / "sweep.json", sweep_to_json(points));

    int failures = 0;
    for (const auto& pt : points) failures += pt.ok ? 0 : 1;
    manifest["results"]["points"] = static_cast<int>(points.size());
    manifest["results"]["failures"] = failures;
    finish_manifest(manifest, dir, started);
    std::cout << points.size() << " sweep points (" << failures << " failures)\n";
    return kExitOk;
}

// --------------------------------------------------------------- scenario

Json expected_value_checks(const Scenario& s) {
    Json arr = Json::array();
    for (const auto& ev : s.expected_values) {
        Json e;
        e["quantity"] = ev.quantity;
        e["expected"] = ev.value;
        e["tolerance"] = ev.tolerance;
        e["relative"] = ev.relative;
        e["source"] = to_string(ev.source);
        const double measured = ev.measure(s);
        const double allowed = ev.relative ? ev.tolerance * std::abs(ev.value) : ev.tolerance;
        e["measured"] = measured;
        e["pass"] = std::abs(measured - ev.value) <= allowed;
        arr.push_back(std::move(e));
    }
    return arr;
}

int run_scenario(const CommonOptions& opts, const std::string& name) {
    const auto started = std::chrono::steady_clock::now();
    if (name == "list") {
        Json catalog = Json::array();
        for (const auto& n : scenario_names()) {
            const Scenario s = make_scenario(n);
            Json e;
            e["name"] = s.name;
            e["description"] = s.description;
            e["recommended_method"] = to_string(s.recommended_method);
            e["dimension"] = s.system.d();
            catalog.push_back(std::move(e));
        }
        std::cout << catalog.dump(2) << "\n";
        return kExitOk;
    }

    const fs::path dir = ensure_out_dir(opts);
    const Scenario s = make_scenario(name);
    Json manifest = base_manifest("scenario", opts);
    manifest["inputs"]["scenario"] = name;

    write_json_file(dir / "system.json", system_to_json(s.system));
    const Json checks = expected_value_checks(s);
    bool all_pass = true;
    for (const auto& c : checks) all_pass = all_pass && c["pass"].get<bool>();
    manifest["results"]["expected_values"] = checks;
    manifest["results"]["all_expectations_pass"] = all_pass;

    const auto grid = uniform_grid(s.horizon, opts.grid);
    if (name == "ecd") {
        const ControlPulse pulse = scenario_steering_pulse(s, SteeringMethod::bump);
        write_pulse_csv(dir / "pulse.csv", pulse, grid);
        // Conditioned quadrature trajectories (one per qubit branch).
        Matrix ab = Matrix::Zero(2, 2);
        ab(0, 0) = s.system.a(1, 1);  // -i chi/2 on the plus branch
        ab(1, 1) = s.system.a(0, 0);
        Matrix cb(2, 1);
        cb << 1.0, 1.0;
        const LinearControlSystem branches =
            LinearControlSystem::create(std::move(ab), std::move(cb), BasisTag::custom);
        const Trajectory traj =
            propagate(branches, pulse.scaled(-kImag), Vector::Zero(2), s.horizon,
                      {.grid_samples = opts.grid});
        write_trajectory_csv(dir / "fig_quadratures.csv", traj);
    } else if (name == "wavepacket") {
        const ControlPulse bump = scenario_steering_pulse(s, SteeringMethod::bump);
        const ControlPulse me = scenario_steering_pulse(s, SteeringMethod::min_effort);
        write_pulse_csv(dir / "pulse_bump.csv", bump, grid);
        write_pulse_csv(dir / "pulse_mineffort.csv", me, grid);
    } else if (name == "two_mode_chain") {
        const LQRProblem p = LQRProblem::create(s.system, s.lqr_q, s.lqr_r, s.x0.real(),
                                                s.goal.real(), s.horizon);
        const LQRSolution sol = solve_bvp(p);
        write_trajectory_csv(dir / "fig_states.csv", sol.trajectory);
        write_pulse_csv(dir / "control.csv", sol.control, grid);
        std::vector<double> qs;
        for (int i = 0; i <= 24; ++i) qs.push_back(std::pow(10.0, -3.0 + 0.25 * i));
        write_sweep_csv(dir / "fig_sweep.csv", weight_sweep(p, qs));
    } else if (name == "optomech") {
        write_json_file(dir / "report.json", kalman_report_to_json(analyze(s.system)));
        const ControlPulse me = scenario_steering_pulse(s, SteeringMethod::min_effort);
        write_pulse_csv(dir / "pulse.csv", me, grid);
        // The physical control is a photon number; flag sign violations.
        double min_real = 0.0;
        for (double t : grid) min_real = std::min(min_real, me(t)(0).real());
        manifest["results"]["min_control_value"] = min_real;
        if (s.nonnegative_control_note && min_real < 0.0) {
            manifest["results"]["warning"] =
                "control dips below zero; photon-number drives cannot realize it directly";
        }
    }

    finish_manifest(manifest, dir, started);
    std::cout << "scenario '" << name << "': expectations "
              << (all_pass ? "all pass" : "FAILED") << "\n";
    return all_pass ? kExitOk : kExitNumericalFailure;
}

// ------------------------------------------------------------- fock-verify

int run_fock_verify(const CommonOptions& opts, const std::string& experiment, double delta,
                    int count) {
    const auto started = std::chrono::steady_clock::now();
    const fs::path dir = ensure_out_dir(opts);
    Json manifest = base_manifest("fock-verify", opts);
    manifest["inputs"]["experiment"] = experiment;
    Json report;
    report["experiment"] = experiment;
    report["dim"] = opts.dim;

    if (experiment == "displacement") {
        const auto cases = displacement_theorem_property(opts.seed, count, opts.dim);
        double min_fidelity = 1.0;
        Json runs = Json::array();
        for (const auto& c : cases) {
            Json r;
            r["g"] = c.g;
            r["b"] = {c.b.real(), c.b.imag()};
            r["shift"] = {c.check.shift.real(), c.check.shift.imag()};
            r["fidelity"] = c.check.fidelity;
            r["leakage"] = c.check.leakage;
            r["steps"] = c.check.steps;
            min_fidelity = std::min(min_fidelity, c.check.fidelity);
            runs.push_back(std::move(r));
        }
        report["runs"] = std::move(runs);
        report["min_fidelity"] = min_fidelity;
        manifest["results"]["min_fidelity"] = min_fidelity;
    } else if (experiment == "ecd") {
        const Scenario s = make_scenario("ecd");
        const ControlPulse pulse = scenario_steering_pulse(s, SteeringMethod::bump);
        auto drive = [pulse](double t) { return pulse(t)(0); };
        const auto run = conditional_displacement_run(3.0, drive, s.horizon, 3.0, opts.dim);
        report["endpoint_plus"] = {run.endpoint_plus.real(), run.endpoint_plus.imag()};
        report["endpoint_minus"] = {run.endpoint_minus.real(), run.endpoint_minus.imag()};
        report["fidelity_plus"] = run.fidelity_plus;
        report["fidelity_minus"] = run.fidelity_minus;
        report["leakage"] = run.leakage;
        report["steps"] = run.steps;
        manifest["results"]["fidelity_plus"] = run.fidelity_plus;
        manifest["results"]["fidelity_minus"] = run.fidelity_minus;
    } else if (experiment == "anharmonic") {
        Json runs = Json::array();
        std::ofstream csv(dir / "fidelity_vs_weight.csv");
        csv << "q_over_r,fidelity\n";
        for (double qr : {1e-3, 1.0, 1e3}) {
            const auto res = transport_fidelity_experiment(delta, qr, 2.0, 0.5, opts.horizon,
                                                           opts.dim);
            Json r;
            r["q_over_r"] = qr;
            r["delta"] = delta;
            r["fidelity"] = res.fidelity;
            r["leakage"] = res.leakage;
            r["steps"] = res.steps;
            r["linear_endpoint_error"] = res.linear_endpoint_error;
            runs.push_back(std::move(r));
            csv << format_double(qr) << "," << format_double(res.fidelity) << "\n";
        }
        report["runs"] = std::move(runs);
        manifest["results"]["runs"] = report["runs"];
    } else {
        throw InvalidInputError("fock-verify supports displacement|ecd|anharmonic");
    }

    write_json_file(dir / "fock_report.json", report);
    finish_manifest(manifest, dir, started);
    std::cout << "fock-verify '" << experiment << "' written\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    for (int i = 0; i < argc; ++i) g_argv.emplace_back(argv[i]);

    CLI::App app{"Control synthesis toolkit for driven quadratic bosonic systems"};
    app.require_subcommand(1);

    CommonOptions opts;
    std::string x0_text, goal_text, scenario_name, experiment = "displacement";
    double q_min = 1e-3, q_max = 1e3, delta = 0.01;
    int q_count = 25, count = 20;

    auto add_common = [&](CLI::App* cmd, bool needs_input) {
        auto* in = cmd->add_option("--input", opts.input_path, "system JSON file");
        if (needs_input) in->required()->check(CLI::ExistingFile);
        cmd->add_option("--out", opts.out_dir, "output directory");
        cmd->add_option("--T", opts.horizon, "horizon");
        cmd->add_option("--tol", opts.tol, "integration tolerance");
        cmd->add_option("--grid", opts.grid, "output grid size");
        cmd->add_option("--dim", opts.dim, "Fock truncation dimension");
        cmd->add_option("--seed", opts.seed, "seed for randomized runs");
        cmd->add_option("--q", opts.q_weight, "state penalty weight");
        cmd->add_option("--r", opts.r_weight, "control penalty weight");
        cmd->add_option("--method", opts.method, "bump|mineffort|lqr");
    };

    auto* analyze_cmd = app.add_subcommand("analyze", "Kalman/normal-mode controllability report");
    add_common(analyze_cmd, true);

    auto* synth_cmd = app.add_subcommand("synthesize", "construct a steering pulse");
    add_common(synth_cmd, true);
    synth_cmd->add_option("--x0", x0_text, "initial state (JSON array)");
    synth_cmd->add_option("--goal", goal_text, "goal state (JSON array)")->required();

    auto* sim_cmd = app.add_subcommand("simulate", "propagate a trajectory");
    add_common(sim_cmd, true);
    sim_cmd->add_option("--x0", x0_text, "initial state (JSON array)");
    sim_cmd->add_option("--goal", goal_text, "steer to this goal before simulating");

    auto* lqr_cmd = app.add_subcommand("lqr", "solve the hard-boundary optimal control problem");
    add_common(lqr_cmd, true);
    lqr_cmd->add_option("--x0", x0_text, "initial state (JSON array)");
    lqr_cmd->add_option("--goal", goal_text, "target state (JSON array)")->required();

    auto* sweep_cmd = app.add_subcommand("sweep", "cost versus state-penalty weight");
    add_common(sweep_cmd, true);
    sweep_cmd->add_option("--x0", x0_text, "initial state (JSON array)");
    sweep_cmd->add_option("--goal", goal_text, "target state (JSON array)")->required();
    sweep_cmd->add_option("--q-min", q_min, "smallest state weight");
    sweep_cmd->add_option("--q-max", q_max, "largest state weight");
    sweep_cmd->add_option("--q-count", q_count, "number of log-spaced points");

    auto* scen_cmd = app.add_subcommand("scenario", "run a preset reproduction");
    add_common(scen_cmd, false);
    scen_cmd->add_option("name", scenario_name, "wavepacket|ecd|two_mode_chain|optomech|list")
        ->required();

    auto* fock_cmd = app.add_subcommand("fock-verify", "quantum verification runs");
    add_common(fock_cmd, false);
    fock_cmd->add_option("--experiment", experiment, "displacement|ecd|anharmonic");
    fock_cmd->add_option("--delta", delta, "anharmonic strength");
    fock_cmd->add_option("--count", count, "number of randomized runs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInvalidInput;
    }

    try {
        if (app.got_subcommand(analyze_cmd)) return run_analyze(opts);
        if (app.got_subcommand(synth_cmd)) return run_synthesize(opts, x0_text, goal_text);
        if (app.got_subcommand(sim_cmd)) return run_simulate(opts, x0_text, goal_text);
        if (app.got_subcommand(lqr_cmd)) return run_lqr(opts, x0_text, goal_text);
        if (app.got_subcommand(sweep_cmd)) {
            return run_sweep(opts, x0_text, goal_text, q_min, q_max, q_count);
        }
        if (app.got_subcommand(scen_cmd)) return run_scenario(opts, scenario_name);
        if (app.got_subcommand(fock_cmd)) return run_fock_verify(opts, experiment, delta, count);
    } catch (const NotControllableError& e) {
        write_error_json(opts, "not_controllable", e.what(),
                         kalman_report_to_json(e.report));
        std::cerr << "error: " << e.what() << "\n";
        return kExitNotControllable;
    } catch (const InvalidInputError& e) {
        write_error_json(opts, "invalid_input", e.what());
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalidInput;
    } catch (const NumericalError& e) {
        write_error_json(opts, "numerical_failure", e.what());
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumericalFailure;
    } catch (const std::exception& e) {
        write_error_json(opts, "numerical_failure", e.what());
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumericalFailure;
    }
    return kExitInvalidInput;
}
