#include "quadctrl/scenarios.hpp"

#include "quadctrl/dynamics.hpp"
#include "quadctrl/lqr.hpp"
#include "support/test_helpers.hpp"

#include <doctest.h>

#include <cmath>

using namespace quadctrl;

namespace {

void check_expectations(const Scenario& s) {
    for (const auto& ev : s.expected_values) {
        CAPTURE(s.name);
        CAPTURE(ev.quantity);
        const double measured = ev.measure(s);
        const double allowed = ev.relative ? ev.tolerance * std::abs(ev.value) : ev.tolerance;
        CHECK(std::abs(measured - ev.value) <= allowed);
    }
}

}  // namespace

TEST_CASE("wavepacket preset meets its recorded expectations") {
    check_expectations(wavepacket_scenario());
}

TEST_CASE("conditional-displacement preset meets its recorded expectations") {
    check_expectations(ecd_scenario());
}

TEST_CASE("two-mode chain preset meets its recorded expectations") {
    check_expectations(two_mode_chain_scenario());
}

TEST_CASE("wavepacket variants") {
    SUBCASE("zero shift needs no drive") {
        const Scenario s = wavepacket_scenario(1.0, 1.0, 1.0, 0.0);
        const ControlPulse u = scenario_steering_pulse(s, SteeringMethod::bump);
        for (double t : {0.2, 0.6}) CHECK(u(t).norm() < 1e-12);
    }
    SUBCASE("other frequencies still steer and record a positive effort") {
        const Scenario s = wavepacket_scenario(2.0, 1.0, 1.0, 1.0);
        const MinEffortPulse me = min_effort_pulse(s.system, s.x0, s.goal, s.horizon);
        CHECK(me.predicted_cost > 0.0);
        const Trajectory traj = propagate(s.system, me.pulse, s.x0, s.horizon);
        CHECK((traj.final_state() - s.goal).norm() < 1e-8);
        check_expectations(s);  // derived expectations only at non-default settings
    }
}

TEST_CASE("conditional-displacement variants") {
    SUBCASE("zero target displacement needs no drive") {
        const Scenario s = ecd_scenario(3.0, 0.0, 1.0);
        const ControlPulse u = scenario_steering_pulse(s, SteeringMethod::bump);
        for (double t : {0.3, 0.7}) CHECK(u(t).norm() < 1e-12);
    }
    SUBCASE("asymmetric branch targets are reachable") {
        const Scenario s = ecd_scenario();
        Vector goal(2);
        goal << Complex(1.0, 0.5), Complex(-2.0, 0.0);
        const ControlPulse u = synthesize_pulse(s.system, s.x0, goal, s.horizon,
                                                polynomial_bump(2, s.horizon));
        const Trajectory traj = propagate(s.system, u, s.x0, s.horizon);
        CHECK((traj.final_state() - goal).norm() < 1e-8);
    }
}

TEST_CASE("two-mode chain with a zero goal sits still") {
    const Scenario s = two_mode_chain_scenario();
    const LQRProblem p = LQRProblem::create(s.system, s.lqr_q, s.lqr_r, RealVector::Zero(4),
                                            RealVector::Zero(4), s.horizon);
    const LQRSolution sol = solve_bvp(p);
    CHECK(sol.cost < 1e-12);
    for (double t : {0.25, 0.75}) CHECK(sol.control(t).norm() < 1e-7);
}

TEST_CASE("optomechanical drive reachability") {
    auto chain = [](double w1, double w2, double g1, double g2) {
        Matrix g(2, 2);
        g << w1, 0.05, 0.05, w2;
        RealVector couplings(2);
        couplings << g1, g2;
        return optomech_scenario(g, Matrix::Zero(2, 2), couplings);
    };
    SUBCASE("distinct coupled modes are controllable") {
        const Scenario s = chain(1.0, 1.6, 0.4, 0.3);
        CHECK(analyze(s.system).controllable);
        const MinEffortPulse me = min_effort_pulse(s.system, s.x0, s.goal, s.horizon);
        const Trajectory traj = propagate(s.system, me.pulse, s.x0, s.horizon);
        CHECK((traj.final_state() - s.goal).norm() < 1e-7 * (1.0 + s.goal.norm()));
    }
    SUBCASE("no coupling means nothing is reachable") {
        Matrix g(2, 2);
        g << 1.0, 0.0, 0.0, 1.6;
        const Scenario s = optomech_scenario(g, Matrix::Zero(2, 2), RealVector::Zero(2));
        CHECK(analyze(s.system).numerical_rank == 0);
    }
    SUBCASE("degenerate modes with matched couplings are uncontrollable") {
        Matrix g(2, 2);
        g << 1.0, 0.0, 0.0, 1.0;
        RealVector couplings(2);
        couplings << 0.4, 0.4;
        const Scenario s = optomech_scenario(g, Matrix::Zero(2, 2), couplings);
        CHECK_FALSE(analyze(s.system).controllable);
    }
}

TEST_CASE("scenario catalog") {
    const auto names = scenario_names();
    CHECK(names.size() == 4);
    for (const auto& name : names) {
        const Scenario s = make_scenario(name);
        CHECK(s.name == name);
        CHECK(s.system.d() >= 2);
        for (const auto& ev : s.expected_values) {
            const bool tagged = ev.source == ExpectationSource::reported ||
                                ev.source == ExpectationSource::definitional ||
                                ev.source == ExpectationSource::derived;
            CHECK(tagged);
        }
    }
    CHECK_THROWS_AS(make_scenario("nonsense"), InvalidInputError);
}
