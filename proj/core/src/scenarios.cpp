#include "quadctrl/scenarios.hpp"

#include "quadctrl/dynamics.hpp"
#include "quadctrl/linalg.hpp"
#include "quadctrl/lqr.hpp"

#include <cmath>
#include <utility>

namespace quadctrl {

namespace {

ExpectedValue expect(std::string quantity, double value, double tol, bool relative,
                     ExpectationSource source, std::function<double(const Scenario&)> measure) {
    ExpectedValue e;
    e.quantity = std::move(quantity);
    e.value = value;
    e.tolerance = tol;
    e.relative = relative;
    e.source = source;
    e.measure = std::move(measure);
    return e;
}

double measured_rank(const Scenario& s) {
    return static_cast<double>(analyze(s.system).numerical_rank);
}

double bump_order_default(const Scenario& s) { return static_cast<double>(s.system.d()); }

ControlPulse default_bump_pulse(const Scenario& s) {
    const int order = static_cast<int>(bump_order_default(s));
    return synthesize_pulse(s.system, s.x0, s.goal, s.horizon,
                            polynomial_bump(order, s.horizon))
        .scaled(s.drive_gauge);
}

}  // namespace

Scenario wavepacket_scenario(double omega, double mass, double horizon, double shift) {
    if (!(omega > 0.0) || !(mass > 0.0) || !(horizon > 0.0)) {
        throw InvalidInputError("wavepacket_scenario: omega, mass, horizon must be positive");
    }
    Scenario s;
    s.name = "wavepacket";
    s.description = "harmonic trap transport (x, p), drive on the momentum row";
    RealMatrix a(2, 2);
    a << 0.0, 1.0 / mass, -mass * omega * omega, 0.0;
    RealMatrix c = RealMatrix::Zero(2, 2);
    c(1, 1) = 1.0;
    s.system = LinearControlSystem::create(a.cast<Complex>(), c.cast<Complex>(),
                                           BasisTag::quadrature_basis);
    s.x0 = Vector::Zero(2);
    s.goal = Vector::Zero(2);
    s.goal(0) = shift;
    s.horizon = horizon;
    s.recommended_method = SteeringMethod::min_effort;
    s.half_factor_cost = false;
    s.lqr_q = RealMatrix::Zero(2, 2);
    s.lqr_r = RealMatrix::Identity(2, 2);

    const bool default_setup =
        omega == 1.0 && mass == 1.0 && horizon == 1.0 && shift == 1.0;

    s.expected_values.push_back(expect("kalman_rank", 2.0, 0.0, false,
                                       ExpectationSource::reported, measured_rank));

    auto bump_cost = [](const Scenario& sc) {
        const ControlPulse u = default_bump_pulse(sc);
        const Trajectory traj = propagate(sc.system, u, sc.x0, sc.horizon);
        return evaluate_cost(traj, RealMatrix::Zero(2, 2), RealMatrix::Identity(2, 2), false);
    };
    auto min_effort_cost = [](const Scenario& sc) {
        return min_effort_pulse(sc.system, sc.x0, sc.goal, sc.horizon).predicted_cost;
    };
    auto bump_endpoint = [](const Scenario& sc) {
        const ControlPulse u = default_bump_pulse(sc);
        const Trajectory traj = propagate(sc.system, u, sc.x0, sc.horizon);
        return (traj.final_state() - sc.goal).norm();
    };
    auto me_realized_over_predicted = [](const Scenario& sc) {
        const MinEffortPulse me = min_effort_pulse(sc.system, sc.x0, sc.goal, sc.horizon);
        const Trajectory traj = propagate(sc.system, me.pulse, sc.x0, sc.horizon);
        const double realized =
            evaluate_cost(traj, RealMatrix::Zero(2, 2), RealMatrix::Identity(2, 2), false);
        return realized / me.predicted_cost;
    };

    if (default_setup) {
        s.expected_values.push_back(expect("bump_cost", 15.3, 0.01, true,
                                           ExpectationSource::reported, bump_cost));
        s.expected_values.push_back(expect("min_effort_cost", 9.97, 0.01, true,
                                           ExpectationSource::reported, min_effort_cost));
    }
    s.expected_values.push_back(expect("bump_endpoint_error", 0.0, 1e-8, false,
                                       ExpectationSource::derived, bump_endpoint));
    s.expected_values.push_back(expect("min_effort_realized_over_predicted", 1.0, 0.005, true,
                                       ExpectationSource::derived, me_realized_over_predicted));
    return s;
}

Scenario ecd_scenario(double chi, double beta, double horizon) {
    if (chi == 0.0) throw InvalidInputError("ecd_scenario: chi must be nonzero");
    if (!(horizon > 0.0)) throw InvalidInputError("ecd_scenario: horizon must be positive");
    Scenario s;
    s.name = "ecd";
    s.description = "conditional displacement of a dispersively coupled cavity";
    Matrix a = Matrix::Zero(2, 2);
    a(0, 0) = kImag * 0.5 * chi;
    a(1, 1) = -kImag * 0.5 * chi;
    Matrix c(2, 1);
    c << 1.0, 1.0;
    s.system = LinearControlSystem::create(std::move(a), std::move(c), BasisTag::custom);
    s.x0 = Vector::Zero(2);
    s.goal.resize(2);
    s.goal << 0.5 * beta, -0.5 * beta;
    s.horizon = horizon;
    s.recommended_method = SteeringMethod::bump;
    s.half_factor_cost = false;
    // The Hamiltonian drive enters the branch equations of motion with a
    // factor -i, so the physical amplitude is -i times the linear control.
    s.drive_gauge = -kImag;

    const BumpFunction mu = polynomial_bump(2, horizon);
    s.golden_pulse = [mu, chi, beta, horizon](double t) {
        const double theta = 0.5 * chi * (t - horizon);
        return beta * (mu.derivative(t, 0) * std::sin(theta) -
                       mu.derivative(t, 1) / chi * std::cos(theta));
    };

    s.expected_values.push_back(expect("kalman_rank", 2.0, 0.0, false,
                                       ExpectationSource::reported, measured_rank));
    s.expected_values.push_back(expect(
        "det_kalman_real", 0.0, 1e-12, false, ExpectationSource::reported,
        [](const Scenario& sc) {
            return std::real(Matrix(kalman_matrix(sc.system)).determinant());
        }));
    s.expected_values.push_back(expect(
        "det_kalman_imag", -chi, 1e-12, false, ExpectationSource::reported,
        [](const Scenario& sc) {
            return std::imag(Matrix(kalman_matrix(sc.system)).determinant());
        }));
    s.expected_values.push_back(expect(
        "golden_pulse_max_deviation", 0.0, 1e-9, false, ExpectationSource::reported,
        [](const Scenario& sc) {
            const ControlPulse u = default_bump_pulse(sc);
            double dev = 0.0;
            for (int i = 0; i < 1000; ++i) {
                const double t = sc.horizon * i / 999.0;
                dev = std::max(dev, std::abs(u(t)(0) - sc.golden_pulse(t)));
            }
            return dev;
        }));

    // Branch equations of motion d<a>+-/dt = -+ i(chi/2)<a>+- - i u(t),
    // propagated under the physical drive.
    auto branch_endpoints = [chi](const Scenario& sc) {
        const ControlPulse u_phys = default_bump_pulse(sc);
        Matrix ab = Matrix::Zero(2, 2);
        ab(0, 0) = -kImag * 0.5 * chi;
        ab(1, 1) = kImag * 0.5 * chi;
        Matrix cb(2, 1);
        cb << 1.0, 1.0;
        const LinearControlSystem branches =
            LinearControlSystem::create(std::move(ab), std::move(cb), BasisTag::custom);
        const ControlPulse drive = u_phys.scaled(-kImag);  // -i u(t) per row
        return propagate(branches, drive, Vector::Zero(2), sc.horizon).final_state();
    };
    s.expected_values.push_back(expect(
        "branch_endpoint_plus_real", 0.5 * beta, 1e-6, false, ExpectationSource::reported,
        [branch_endpoints](const Scenario& sc) { return branch_endpoints(sc)(0).real(); }));
    s.expected_values.push_back(expect(
        "branch_endpoint_minus_real", -0.5 * beta, 1e-6, false, ExpectationSource::reported,
        [branch_endpoints](const Scenario& sc) { return branch_endpoints(sc)(1).real(); }));
    s.expected_values.push_back(expect(
        "branch_endpoint_imag_magnitude", 0.0, 1e-6, false, ExpectationSource::derived,
        [branch_endpoints](const Scenario& sc) {
            const Vector e = branch_endpoints(sc);
            return std::max(std::abs(e(0).imag()), std::abs(e(1).imag()));
        }));
    return s;
}

Scenario two_mode_chain_scenario() {
    Scenario s;
    s.name = "two_mode_chain";
    s.description = "two coupled modes with squeezing, single drive on the first element";
    RealMatrix a(4, 4);
    a << 0, 1, 2, 0,
         1, 0, 0, 2,
        -2, -1, 0, -1,
        -1, 2, 1, 0;
    a *= 2.0;
    RealMatrix c(4, 1);
    c << 1, 0, -1, 0;
    s.system = LinearControlSystem::create(a.cast<Complex>(), c.cast<Complex>(),
                                           BasisTag::quadrature_basis);
    s.x0 = Vector::Zero(4);
    s.goal.resize(4);
    s.goal << 1.0, 2.0, 3.0, 4.0;
    s.horizon = 1.0;
    s.recommended_method = SteeringMethod::lqr;
    s.half_factor_cost = true;
    s.lqr_q = RealMatrix::Identity(4, 4);
    s.lqr_r = RealMatrix::Identity(1, 1);

    s.expected_values.push_back(expect("kalman_rank", 4.0, 0.0, false,
                                       ExpectationSource::reported, measured_rank));
    s.expected_values.push_back(expect(
        "kalman_rank_diagonal_mask", 4.0, 0.0, false, ExpectationSource::reported,
        [](const Scenario& sc) {
            Matrix mask = Matrix::Zero(4, 4);
            mask(0, 0) = mask(2, 2) = 1.0;
            const LinearControlSystem masked = LinearControlSystem::create(
                sc.system.a, std::move(mask), BasisTag::quadrature_basis);
            return static_cast<double>(analyze(masked).numerical_rank);
        }));

    auto solve = [](const Scenario& sc) {
        const LQRProblem p = LQRProblem::create(sc.system, sc.lqr_q, sc.lqr_r,
                                                sc.x0.real(), sc.goal.real(), sc.horizon);
        return solve_bvp(p);
    };
    s.expected_values.push_back(expect(
        "lqr_endpoint_error", 0.0, 1e-6, false, ExpectationSource::reported,
        [solve](const Scenario& sc) {
            return (solve(sc).trajectory.final_state() - sc.goal).norm();
        }));
    s.expected_values.push_back(expect(
        "pontryagin_residual", 0.0, 1e-8, false, ExpectationSource::derived,
        [solve](const Scenario& sc) {
            const LQRProblem p = LQRProblem::create(sc.system, sc.lqr_q, sc.lqr_r,
                                                    sc.x0.real(), sc.goal.real(), sc.horizon);
            return pontryagin_residuals(p, solve_bvp(p)).max();
        }));
    s.expected_values.push_back(expect(
        "sweep_q0_over_grammian_cost", 1.0, 0.005, true, ExpectationSource::reported,
        [](const Scenario& sc) {
            const LQRProblem p = LQRProblem::create(sc.system, sc.lqr_q, sc.lqr_r,
                                                    sc.x0.real(), sc.goal.real(), sc.horizon);
            const auto points = weight_sweep(p, {1e-6});
            if (!points.front().ok) throw NumericalError(points.front().error);
            const double grammian_cost =
                min_effort_pulse(sc.system, sc.x0, sc.goal, sc.horizon).predicted_cost;
            return 2.0 * points.front().cost / grammian_cost;
        }));
    return s;
}

Scenario optomech_scenario(const Matrix& g_couplings, const Matrix& b_squeeze,
                           const RealVector& drive_couplings) {
    const int n = static_cast<int>(g_couplings.rows());
    if (drive_couplings.size() != n) {
        throw InvalidInputError("optomech_scenario: coupling vector length must equal n_modes");
    }
    std::vector<bool> mask(static_cast<std::size_t>(n), true);
    const QuadraticHamiltonian h = QuadraticHamiltonian::create(n, g_couplings, b_squeeze, mask);
    const SymplecticGenerator gen = build_generator(h);

    // Photon-number control enters through i * eta * g with g = (g_i, g_i).
    Vector g(2 * n);
    for (int i = 0; i < n; ++i) {
        g(i) = drive_couplings(i);
        g(n + i) = drive_couplings(i);
    }
    Matrix c = kImag * Matrix(gen.apply_eta(g));

    Scenario s;
    s.name = "optomech";
    s.description = "mechanical modes steered by the cavity photon number";
    s.system = LinearControlSystem::create(gen.matrix, std::move(c), BasisTag::mode_basis);
    s.x0 = Vector::Zero(2 * n);
    s.goal = Vector::Zero(2 * n);
    s.goal(0) = 0.5;
    s.goal(n) = 0.5;  // conjugate pair of the mode-1 displacement
    s.horizon = 1.0;
    s.recommended_method = SteeringMethod::min_effort;
    s.half_factor_cost = false;
    s.nonnegative_control_note = true;
    return s;
}

ControlPulse scenario_steering_pulse(const Scenario& s, SteeringMethod method) {
    switch (method) {
        case SteeringMethod::bump: {
            const int order = static_cast<int>(s.system.d());
            return synthesize_pulse(s.system, s.x0, s.goal, s.horizon,
                                    polynomial_bump(order, s.horizon))
                .scaled(s.drive_gauge);
        }
        case SteeringMethod::min_effort:
            return min_effort_pulse(s.system, s.x0, s.goal, s.horizon)
                .pulse.scaled(s.drive_gauge);
        case SteeringMethod::lqr: {
            if (s.lqr_q.size() == 0 || s.lqr_r.size() == 0) {
                throw InvalidInputError("scenario_steering_pulse: scenario has no LQR weights");
            }
            const LQRProblem p = LQRProblem::create(s.system, s.lqr_q, s.lqr_r, s.x0.real(),
                                                    s.goal.real(), s.horizon);
            return solve_bvp(p).control.scaled(s.drive_gauge);
        }
    }
    throw InvalidInputError("scenario_steering_pulse: unknown method");
}

std::vector<std::string> scenario_names() {
    return {"wavepacket", "ecd", "two_mode_chain", "optomech"};
}

Scenario make_scenario(const std::string& name) {
    if (name == "wavepacket") return wavepacket_scenario();
    if (name == "ecd") return ecd_scenario();
    if (name == "two_mode_chain") return two_mode_chain_scenario();
    if (name == "optomech") {
        Matrix g(2, 2);
        g << 1.0, 0.05, 0.05, 1.6;
        Matrix b = Matrix::Zero(2, 2);
        RealVector couplings(2);
        couplings << 0.4, 0.3;
        return optomech_scenario(g, b, couplings);
    }
    throw InvalidInputError("make_scenario: unknown scenario '" + name + "'");
}

const char* to_string(SteeringMethod m) {
    switch (m) {
        case SteeringMethod::bump: return "bump";
        case SteeringMethod::min_effort: return "mineffort";
        case SteeringMethod::lqr: return "lqr";
    }
    return "unknown";
}

const char* to_string(ExpectationSource s) {
    switch (s) {
        case ExpectationSource::reported: return "reported";
        case ExpectationSource::definitional: return "definitional";
        case ExpectationSource::derived: return "derived";
    }
    return "unknown";
}

}  // namespace quadctrl
