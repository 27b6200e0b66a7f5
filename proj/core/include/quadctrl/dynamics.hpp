// Trajectory propagation under arbitrary pulses, closed-form zero/constant
// drive solutions, and quadratic cost evaluation on dense integrator output.
#pragma once

#include "quadctrl/model.hpp"
#include "quadctrl/ode.hpp"
#include "quadctrl/synthesis.hpp"

#include <optional>
#include <vector>

namespace quadctrl {

struct CostBreakdown {
    double state_integral = 0.0;    // int x^dag Q x dt
    double control_integral = 0.0;  // int u^dag R u dt
    double total = 0.0;             // with the half factor applied if requested
    bool half_factor = false;
};

struct Trajectory {
    std::vector<double> times;     // strictly increasing grid in [0, T]
    std::vector<Vector> states;    // complex d-vectors; states[0] == x0 exactly
    std::vector<Vector> controls;  // m-vectors sampled from the pulse
    DenseSolution dense;           // continuous extension for resampling/quadrature
    ControlPulse pulse;
    std::optional<CostBreakdown> cost_integrals;

    double horizon() const { return times.empty() ? 0.0 : times.back(); }
    const Vector& final_state() const { return states.back(); }
};

struct PropagateOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    int grid_samples = 201;               // uniform output grid size (>= 2)
    std::vector<double> grid;             // explicit output grid overrides grid_samples
};

/// Integrates dx/dt = A x + C u(t) from x0 over [0, T] with adaptive
/// error control and dense output sampled on the caller's grid.
Trajectory propagate(const LinearControlSystem& sys, const ControlPulse& pulse, const Vector& x0,
                     double horizon, const PropagateOptions& opts = {});

/// Zero-drive propagation of the same system (u = 0).
Trajectory propagate_free(const LinearControlSystem& sys, const Vector& x0, double horizon,
                          const PropagateOptions& opts = {});

/// x(t) = e^{At} x0.
Vector free_solution(const Matrix& a, const Vector& x0, double t);
Vector free_solution(const SymplecticGenerator& gen, const Vector& x0, double t);

/// Closed form for a constant drive c:
/// x(t) = e^{-i eta M t} x0 - (eta M)^-1 (1 - e^{-i eta M t}) eta c.
/// Requires eta M invertible (condition number below 1e12); otherwise the
/// caller should integrate, or exponentiate the affine embedding.
Vector constant_drive_solution(const SymplecticGenerator& gen, const Vector& x0,
                               const Vector& c_const, double t);

/// J = int f (x^dag Q x + u^dag R u) dt with f = 1/2 when half_factor,
/// composite 16-node Gauss-Legendre per integrator step. Q must be symmetric
/// PSD and R symmetric positive definite.
double evaluate_cost(const Trajectory& traj, const RealMatrix& q, const RealMatrix& r,
                     bool half_factor);

/// Same, restricted to the window [t0, t1].
CostBreakdown evaluate_cost_breakdown(const Trajectory& traj, const RealMatrix& q,
                                      const RealMatrix& r, bool half_factor, double t0,
                                      double t1);

}  // namespace quadctrl
