// Acceptance suite: every release-gating criterion in one binary, one
// pass/fail line each, tolerances pinned in code. Returns the number of
// failed criteria.

#include "quadctrl/controllability.hpp"
#include "quadctrl/dynamics.hpp"
#include "quadctrl/fock.hpp"
#include "quadctrl/linalg.hpp"
#include "quadctrl/lqr.hpp"
#include "quadctrl/scenarios.hpp"
#include "quadctrl/synthesis.hpp"
#include "support/test_helpers.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

using namespace quadctrl;

namespace {

int g_failures = 0;

void report(int number, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %2d: %-38s %s\n", pass ? "PASS" : "FAIL", number, name.c_str(),
                detail.c_str());
    if (!pass) ++g_failures;
}

void run(int number, const std::string& name, const std::function<std::pair<bool, std::string>()>& body) {
    const auto started = std::chrono::steady_clock::now();
    bool pass = false;
    std::string detail;
    try {
        std::tie(pass, detail) = body();
    } catch (const std::exception& e) {
        pass = false;
        detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    char timing[32];
    std::snprintf(timing, sizeof(timing), " (%.1fs)", seconds);
    report(number, name, pass, detail + timing);
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), pattern, a, b, c);
    return buf;
}

// 1. The synthesized conditional-displacement pulse matches the closed form
//    on 1000 uniform grid points to 1e-9.
std::pair<bool, std::string> ecd_golden_pulse() {
    const Scenario s = ecd_scenario(3.0, 3.0, 1.0);
    const ControlPulse pulse = scenario_steering_pulse(s, SteeringMethod::bump);
    const BumpFunction mu = polynomial_bump(2, 1.0);
    double max_dev = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double t = i / 999.0;
        const double theta = 1.5 * (t - 1.0);
        const double golden = 30.0 * t * (t - 1.0) *
                              ((2.0 - 4.0 * t) * std::cos(theta) +
                               3.0 * t * (t - 1.0) * std::sin(theta));
        max_dev = std::max(max_dev, std::abs(pulse(t)(0) - golden));
    }
    return {max_dev < 1e-9, fmt("max deviation %.3e (tol 1e-9)", max_dev)};
}

// 2. Propagating the two qubit-conditioned branch equations under that pulse
//    reaches (+1.5, -1.5) to 1e-6, and det K = -3i at machine precision.
std::pair<bool, std::string> ecd_endpoint() {
    const Scenario s = ecd_scenario(3.0, 3.0, 1.0);
    const ControlPulse pulse = scenario_steering_pulse(s, SteeringMethod::bump);

    Matrix ab = Matrix::Zero(2, 2);
    ab(0, 0) = -kImag * 1.5;  // d<a>+/dt = -i(chi/2)<a>+ - i u
    ab(1, 1) = kImag * 1.5;
    Matrix cb(2, 1);
    cb << 1.0, 1.0;
    const LinearControlSystem branches =
        LinearControlSystem::create(std::move(ab), std::move(cb), BasisTag::custom);
    const Vector endpoint =
        propagate(branches, pulse.scaled(-kImag), Vector::Zero(2), 1.0).final_state();
    const double err = std::max(std::abs(endpoint(0) - Complex(1.5, 0.0)),
                                std::abs(endpoint(1) - Complex(-1.5, 0.0)));

    const Complex det = Matrix(kalman_matrix(s.system)).determinant();
    const double det_err = std::abs(det - Complex(0.0, -3.0));
    const bool pass = err < 1e-6 && det_err < 1e-14;
    return {pass, fmt("endpoint error %.3e (tol 1e-6), |det K + 3i| = %.1e", err, det_err)};
}

// 3. Trap-transport costs: kernel-synthesized pulse 15.3 and minimum-effort
//    9.97, both within 1%. The nominal kernel is N t^2 (T-t)^2; the
//    literal t^2 (1 - t^2) variant is evaluated alongside for the record.
std::pair<bool, std::string> wavepacket_costs() {
    const Scenario s = wavepacket_scenario();
    const RealMatrix q0 = RealMatrix::Zero(2, 2);
    const RealMatrix r_id = RealMatrix::Identity(2, 2);

    const ControlPulse bump = scenario_steering_pulse(s, SteeringMethod::bump);
    const double bump_cost =
        evaluate_cost(propagate(s.system, bump, s.x0, 1.0), q0, r_id, false);

    const MinEffortPulse me = min_effort_pulse(s.system, s.x0, s.goal, 1.0);
    const double me_cost =
        evaluate_cost(propagate(s.system, me.pulse, s.x0, 1.0), q0, r_id, false);

    // Non-conforming variant, normalized to unit mass: its first derivative
    // does not vanish at t = T, and its cost does not land on 15.3.
    const BumpFunction literal = BumpFunction::custom(
        2, 1.0,
        [](double t, int k) {
            const double n = 7.5;
            switch (k) {
                case 0: return n * (t * t - t * t * t * t);
                case 1: return n * (2.0 * t - 4.0 * t * t * t);
                default: return n * (2.0 - 12.0 * t * t);
            }
        },
        7.5, /*validate=*/false);
    const ControlPulse literal_pulse = synthesize_pulse(s.system, s.x0, s.goal, 1.0, literal);
    const double literal_cost =
        evaluate_cost(propagate(s.system, literal_pulse, s.x0, 1.0), q0, r_id, false);

    const bool pass = std::abs(bump_cost - 15.3) <= 0.01 * 15.3 &&
                      std::abs(me_cost - 9.97) <= 0.01 * 9.97;
    return {pass, fmt("kernel cost %.4f (15.3 +- 1%%), min effort %.4f (9.97 +- 1%%); "
                      "literal t^2(1-t^2) variant records %.2f",
                      bump_cost, me_cost, literal_cost)};
}

// 4. The two-mode boundary problem reaches (1,2,3,4) at T=1 within 1e-6 and
//    satisfies the optimality-equation residual bound 1e-8.
std::pair<bool, std::string> two_mode_lqr() {
    const Scenario s = two_mode_chain_scenario();
    const LQRProblem p = LQRProblem::create(s.system, s.lqr_q, s.lqr_r, s.x0.real(),
                                            s.goal.real(), s.horizon);
    const LQRSolution sol = solve_bvp(p);
    const double endpoint = (sol.trajectory.final_state() - s.goal).norm();
    const double residual = pontryagin_residuals(p, sol).max();
    const bool pass = endpoint < 1e-6 && residual < 1e-8;
    return {pass, fmt("endpoint %.3e (tol 1e-6), residual %.3e (tol 1e-8)", endpoint, residual)};
}

// 5. The weight sweep at q = 1e-6 agrees with the Grammian minimum-effort
//    cost within 0.5% once the half factor is reconciled.
std::pair<bool, std::string> sweep_grammian_limit() {
    const Scenario s = two_mode_chain_scenario();
    const LQRProblem p = LQRProblem::create(s.system, s.lqr_q, s.lqr_r, s.x0.real(),
                                            s.goal.real(), s.horizon);
    const auto pts = weight_sweep(p, {1e-6});
    if (!pts[0].ok) return {false, "sweep point failed: " + pts[0].error};
    const double grammian_cost = min_effort_pulse(s.system, s.x0, s.goal, 1.0).predicted_cost;
    const double ratio = 2.0 * pts[0].cost / grammian_cost;
    return {std::abs(ratio - 1.0) < 0.005,
            fmt("2*J(q=1e-6) / grammian cost = %.6f (tol 0.5%%)", ratio)};
}

// 6. Kalman matrices: trap transport K equals [[0,0,0,1],[0,1,0,0]] with
//    rank 2; the two-mode chain has rank 4.
std::pair<bool, std::string> kalman_ranks() {
    const Scenario wp = wavepacket_scenario();
    const KalmanReport wp_report = analyze(wp.system);
    Matrix expected(2, 4);
    expected << 0, 0, 0, 1,
                0, 1, 0, 0;
    const double entry_dev = max_abs(Matrix(wp_report.kalman - expected));

    const Scenario tm = two_mode_chain_scenario();
    const int tm_rank = analyze(tm.system).numerical_rank;
    const bool pass = entry_dev == 0.0 && wp_report.numerical_rank == 2 && tm_rank == 4;
    return {pass, fmt("K entry deviation %.1e, ranks %g and %g", entry_dev,
                      double(wp_report.numerical_rank), double(tm_rank))};
}

// 7. Displacement theorem: for 20 random driven single-mode systems the
//    final Fock state is the free-evolved state displaced by the classical
//    shift, fidelity > 1 - 1e-5 at truncation 40.
std::pair<bool, std::string> displacement_property() {
    const auto cases = displacement_theorem_property(/*seed=*/20260810, /*count=*/20,
                                                     /*dim=*/40);
    double min_fidelity = 1.0;
    for (const auto& c : cases) min_fidelity = std::min(min_fidelity, c.check.fidelity);
    return {min_fidelity > 1.0 - 1e-5,
            fmt("min fidelity %.8f over 20 runs (floor 1 - 1e-5)", min_fidelity)};
}

// 8. Steering property: on 100 random controllable systems (d <= 6, m <= 2)
//    both constructions reach the goal within 1e-6 relative error and the
//    minimum-effort cost never exceeds the kernel cost.
std::pair<bool, std::string> steering_property() {
    testing::Rng rng(777);
    double worst_endpoint = 0.0;
    int cost_violations = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const int d = rng.integer(2, 6);
        const int m = rng.integer(1, 2);
        const LinearControlSystem sys = rng.controllable_system(d, m);
        const Vector x0 = rng.complex_vector(d);
        const Vector goal = rng.complex_vector(d);

        const ControlPulse bump =
            synthesize_pulse(sys, x0, goal, 1.0, polynomial_bump(d, 1.0));
        const MinEffortPulse me = min_effort_pulse(sys, x0, goal, 1.0);

        const Trajectory bt = propagate(sys, bump, x0, 1.0);
        const Trajectory mt = propagate(sys, me.pulse, x0, 1.0);
        const double scale = 1.0 + goal.norm();
        worst_endpoint = std::max(worst_endpoint, (bt.final_state() - goal).norm() / scale);
        worst_endpoint = std::max(worst_endpoint, (mt.final_state() - goal).norm() / scale);

        const RealMatrix q0 = RealMatrix::Zero(d, d);
        const RealMatrix r_id = RealMatrix::Identity(m, m);
        const double bump_cost = evaluate_cost(bt, q0, r_id, false);
        const double me_cost = evaluate_cost(mt, q0, r_id, false);
        if (me_cost > bump_cost * (1.0 + 1e-9)) ++cost_violations;
    }
    const bool pass = worst_endpoint < 1e-6 && cost_violations == 0;
    return {pass, fmt("worst relative endpoint %.3e (tol 1e-6), %g cost inversions",
                      worst_endpoint, double(cost_violations))};
}

// 9. Anharmonic transport: fidelity at delta = 0.01 is nondecreasing across
//    q/r in {1e-3, 1, 1e3}, and the delta = 0 control is exact to 1e-4.
std::pair<bool, std::string> anharmonic_trend() {
    double fids[3] = {0.0, 0.0, 0.0};
    const double ratios[3] = {1e-3, 1.0, 1e3};
    for (int i = 0; i < 3; ++i) {
        fids[i] = transport_fidelity_experiment(0.01, ratios[i]).fidelity;
    }
    bool monotone = fids[0] <= fids[1] + 1e-12 && fids[1] <= fids[2] + 1e-12;
    bool in_range = true;
    for (double f : fids) in_range = in_range && f >= 0.0 && f <= 1.0 + 1e-12;

    double linear_min = 1.0;
    for (double ratio : ratios) {
        linear_min = std::min(linear_min,
                              transport_fidelity_experiment(0.0, ratio).fidelity);
    }
    const bool pass = monotone && in_range && linear_min > 1.0 - 1e-4;
    return {pass, fmt("fidelities %.5f <= %.5f <= %.5f; ", fids[0], fids[1], fids[2]) +
                      fmt("min linear fidelity %.6f (floor 1 - 1e-4)", linear_min)};
}

// 10. Chain criterion: random nearest-neighbour chains (N = 2..5) with
//     unbalanced couplings and a clean spectrum are end-drive controllable.
std::pair<bool, std::string> chain_property() {
    testing::Rng rng(4242);
    int checked = 0;
    int failures = 0;
    for (int n = 2; n <= 5; ++n) {
        int per_size = 0;
        while (per_size < 8) {
            Matrix g = Matrix::Zero(n, n), b = Matrix::Zero(n, n);
            for (int i = 0; i < n; ++i) {
                g(i, i) = rng.uniform(0.5, 2.0);
                b(i, i) = rng.uniform(-0.3, 0.3);
            }
            bool coupling_ok = true;
            for (int i = 0; i + 1 < n; ++i) {
                const Complex hop = rng.complex_uniform(1.0);
                const Complex squeeze = rng.complex_uniform(1.0);
                if (std::abs(std::norm(hop) - std::norm(squeeze)) < 1e-2) {
                    coupling_ok = false;
                    break;
                }
                g(i, i + 1) = hop;
                g(i + 1, i) = std::conj(hop);
                b(i, i + 1) = squeeze;
                b(i + 1, i) = squeeze;
            }
            if (!coupling_ok) continue;
            std::vector<bool> mask(static_cast<std::size_t>(n), false);
            mask[0] = true;
            const QuadraticHamiltonian h = QuadraticHamiltonian::create(n, g, b, mask);
            if (!chain_criterion(h).satisfied) continue;

            const SymplecticGenerator gen = build_generator(h);
            Vector drive = Vector::Zero(2 * n);
            drive(0) = 1.0;
            drive(n) = 1.0;
            const NormalModeReport nm = normal_mode_analysis(gen, drive);
            if (nm.diagnosis == NormalModeDiagnosis::non_diagonalizable) continue;
            if (nm.min_eigenvalue_gap < 1e-3) continue;

            ++per_size;
            ++checked;
            if (!analyze(control_system(h)).controllable) ++failures;
        }
    }
    return {failures == 0,
            fmt("%g/%g random chains controllable", double(checked - failures),
                double(checked))};
}

}  // namespace

int main() {
    std::printf("quadctrl acceptance suite\n");
    run(1, "conditional-displacement golden pulse", ecd_golden_pulse);
    run(2, "conditional-displacement endpoint", ecd_endpoint);
    run(3, "trap-transport steering costs", wavepacket_costs);
    run(4, "two-mode boundary-value control", two_mode_lqr);
    run(5, "sweep limit vs Grammian cost", sweep_grammian_limit);
    run(6, "Kalman matrices and ranks", kalman_ranks);
    run(7, "displacement theorem (quantum)", displacement_property);
    run(8, "steering property (100 systems)", steering_property);
    run(9, "anharmonic transport fidelity trend", anharmonic_trend);
    run(10, "chain criterion controllability", chain_property);
    if (g_failures == 0) {
        std::printf("all criteria passed\n");
    } else {
        std::printf("%d criteria FAILED\n", g_failures);
    }
    return g_failures;
}
