// Preset builders for the worked applications: trap transport, conditional
// displacement, the two-mode squeezing chain, and the optomechanical chain.
// Each preset carries its goal specification and the quantitative
// expectations the acceptance suite checks.
#pragma once

#include "quadctrl/controllability.hpp"
#include "quadctrl/model.hpp"
#include "quadctrl/synthesis.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace quadctrl {

enum class SteeringMethod { bump, min_effort, lqr };

/// Where an expected value comes from: quoted from the source material,
/// forced by construction, or computed through an independent method.
enum class ExpectationSource { reported, definitional, derived };

struct Scenario;

struct ExpectedValue {
    std::string quantity;
    double value = 0.0;
    double tolerance = 0.0;  // absolute unless relative is set
    bool relative = false;
    ExpectationSource source = ExpectationSource::definitional;
    std::function<double(const Scenario&)> measure;
};

struct Scenario {
    std::string name;
    std::string description;
    LinearControlSystem system;
    Vector x0;
    Vector goal;
    double horizon = 1.0;
    SteeringMethod recommended_method = SteeringMethod::bump;
    bool half_factor_cost = false;
    std::vector<ExpectedValue> expected_values;

    /// Phase factor mapping the synthesized linear-control pulse onto the
    /// physical drive amplitude (1 when the two coincide).
    Complex drive_gauge{1.0, 0.0};
    /// Closed-form reference drive, when one exists.
    std::function<double(double)> golden_pulse;
    /// Default LQR weights for scenarios solved as boundary problems.
    RealMatrix lqr_q, lqr_r;
    /// Scalar-control direction metadata (e.g. photon number must stay
    /// nonnegative for the optomechanical drive).
    bool nonnegative_control_note = false;
};

/// Harmonic trap transport: A = [[0, 1/m], [-m w^2, 0]], drive on the
/// momentum row, steering (0, 0) -> (shift, 0) over T.
Scenario wavepacket_scenario(double omega = 1.0, double mass = 1.0, double horizon = 1.0,
                             double shift = 1.0);

/// Dispersive conditional displacement: A = i(chi/2) diag(1, -1),
/// C = [1, 1]^T, goal (beta/2, -beta/2). The physical drive is the
/// synthesized control times the -i gauge.
Scenario ecd_scenario(double chi = 3.0, double beta = 3.0, double horizon = 1.0);

/// Two coupled modes with squeezing, driven through (1, 0, -1, 0);
/// boundary-value steering 0 -> (1, 2, 3, 4) at T = 1 with q = r = 1.
Scenario two_mode_chain_scenario();

/// Mechanical modes (G, B) driven by the cavity photon number through the
/// coupling vector g. The control is physically nonnegative; that constraint
/// is reported, not enforced.
Scenario optomech_scenario(const Matrix& g_couplings, const Matrix& b_squeeze,
                           const RealVector& drive_couplings);

/// Steering pulse for a scenario's recommended construction, with the
/// scenario's drive gauge applied.
ControlPulse scenario_steering_pulse(const Scenario& s, SteeringMethod method);

std::vector<std::string> scenario_names();
Scenario make_scenario(const std::string& name);

const char* to_string(SteeringMethod m);
const char* to_string(ExpectationSource s);

}  // namespace quadctrl
