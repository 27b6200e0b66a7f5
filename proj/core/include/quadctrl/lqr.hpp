// Hard-boundary linear-quadratic optimal control via the coupled
// state/adjoint system, plus cost-versus-weight sweeps.
#pragma once

#include "quadctrl/dynamics.hpp"
#include "quadctrl/model.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace quadctrl {

/// Steer a real linear system from x0 to exactly xT over [0, T] while
/// minimizing int (x^T Q x + u^T R u)/2 dt.
struct LQRProblem {
    LinearControlSystem sys;  // must be real-valued
    RealMatrix q;             // d x d symmetric PSD
    RealMatrix r;             // m x m symmetric PD
    RealVector x0;
    RealVector x_target;
    double horizon = 0.0;

    static LQRProblem create(LinearControlSystem sys, RealMatrix q, RealMatrix r, RealVector x0,
                             RealVector x_target, double horizon);
};

struct LQRSolution {
    RealVector lambda0;   // initial adjoint
    Trajectory trajectory;
    ControlPulse control;
    double cost = 0.0;    // half-factor quadratic cost from the integrated trajectory

    double bvp_condition = 0.0;  // condition estimate of the boundary solve
    int segments = 1;            // transition-matrix segments used

    /// Analytic state and costate along z(t) = e^{H t} (x0, lambda0).
    std::function<RealVector(double)> state_analytic;
    std::function<RealVector(double)> costate;
};

/// Forms the block system z' = H z, H = [[A, -C R^-1 C^T], [-Q, -A^T]], and
/// solves the two-point boundary problem by transition matrices: one linear
/// solve, with the horizon split into segments when e^{HT} would overflow
/// the dynamic range (the split keeps per-segment growth near e^10, so long
/// horizons and strong weights stay well conditioned).
LQRSolution solve_bvp(const LQRProblem& p);

struct PontryaginResiduals {
    double state = 0.0;    // integrator state vs analytic transition-matrix state
    double adjoint = 0.0;  // independently re-integrated adjoint vs analytic costate
    double control = 0.0;  // u + R^-1 C^T lambda along the re-integrated costate
    double max() const;
};

/// Max-norm residuals of the three optimality equations evaluated on a dense
/// grid, each comparing an independent integration route against the
/// transition-matrix solution.
PontryaginResiduals pontryagin_residuals(const LQRProblem& p, const LQRSolution& sol,
                                         int samples = 257);

struct SweepPoint {
    double q_weight = 0.0;
    double cost = 0.0;
    bool ok = false;
    std::string error;
};

/// Re-solves the boundary problem with Q = q*I for each q; per-point
/// failures are recorded and the sweep continues. Points run in parallel
/// (capped by QUADCTRL_THREADS) with deterministic output ordering.
std::vector<SweepPoint> weight_sweep(const LQRProblem& problem_template,
                                     const std::vector<double>& q_values);

/// Standard real embedding of a complex system:
/// [[Re A, -Im A], [Im A, Re A]], acting on (Re x, Im x).
LinearControlSystem complex_to_real_embedding(const LinearControlSystem& sys);

RealVector embed_complex_vector(const Vector& x);
Vector unembed_real_vector(const RealVector& x);

}  // namespace quadctrl
