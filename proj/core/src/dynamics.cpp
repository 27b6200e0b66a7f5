#include "quadctrl/dynamics.hpp"

#include "quadctrl/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace quadctrl {

namespace {

Trajectory propagate_impl(const LinearControlSystem& sys, const ControlPulse& pulse,
                          bool has_pulse, const Vector& x0, double horizon,
                          const PropagateOptions& opts) {
    if (x0.size() != sys.d()) throw InvalidInputError("propagate: x0 must have dimension d");
    if (!(horizon > 0.0)) throw InvalidInputError("propagate: horizon must be positive");
    if (has_pulse && pulse.horizon() < horizon - 1e-12) {
        throw InvalidInputError("propagate: pulse horizon is shorter than the integration span");
    }

    auto rhs = [&sys, &pulse, has_pulse](double t, const Vector& x, Vector& dxdt) {
        dxdt.noalias() = sys.a * x;
        if (has_pulse) dxdt.noalias() += sys.c * pulse(t);
    };

    IntegrationOptions iopts;
    iopts.rel_tol = opts.rel_tol;
    iopts.abs_tol = opts.abs_tol;

    Trajectory traj;
    traj.dense = integrate_dopri5(rhs, x0, 0.0, horizon, iopts);
    traj.pulse = has_pulse ? pulse : ControlPulse();

    if (!opts.grid.empty()) {
        traj.times = opts.grid;
        for (std::size_t i = 1; i < traj.times.size(); ++i) {
            if (!(traj.times[i] > traj.times[i - 1])) {
                throw InvalidInputError("propagate: output grid must be strictly increasing");
            }
        }
    } else {
        const int samples = std::max(2, opts.grid_samples);
        traj.times.resize(static_cast<std::size_t>(samples));
        for (int i = 0; i < samples; ++i) {
            traj.times[static_cast<std::size_t>(i)] = horizon * i / (samples - 1);
        }
    }
    traj.states.reserve(traj.times.size());
    traj.controls.reserve(traj.times.size());
    const int m = static_cast<int>(sys.m());
    for (double t : traj.times) {
        traj.states.push_back(t == 0.0 ? x0 : traj.dense.at(t));
        traj.controls.push_back(has_pulse ? pulse(t) : Vector::Zero(m));
    }
    return traj;
}

void check_cost_weights(const RealMatrix& q, const RealMatrix& r) {
    const double tol = 1e-12;
    if (max_abs(RealMatrix(q - q.transpose())) > tol ||
        max_abs(RealMatrix(r - r.transpose())) > tol) {
        throw InvalidInputError("evaluate_cost: Q and R must be symmetric");
    }
    Eigen::SelfAdjointEigenSolver<RealMatrix> eq(q);
    if (eq.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, max_abs(q))) {
        throw InvalidInputError("evaluate_cost: Q must be positive semidefinite");
    }
    Eigen::SelfAdjointEigenSolver<RealMatrix> er(r);
    if (er.eigenvalues().minCoeff() <= 0.0) {
        throw InvalidInputError("evaluate_cost: R must be positive definite");
    }
}

}  // namespace

Trajectory propagate(const LinearControlSystem& sys, const ControlPulse& pulse, const Vector& x0,
                     double horizon, const PropagateOptions& opts) {
    if (pulse.controls() != sys.m()) {
        throw InvalidInputError("propagate: pulse control count differs from the system's");
    }
    return propagate_impl(sys, pulse, true, x0, horizon, opts);
}

Trajectory propagate_free(const LinearControlSystem& sys, const Vector& x0, double horizon,
                          const PropagateOptions& opts) {
    return propagate_impl(sys, ControlPulse(), false, x0, horizon, opts);
}

Vector free_solution(const Matrix& a, const Vector& x0, double t) {
    if (a.rows() != x0.size()) throw InvalidInputError("free_solution: dimension mismatch");
    if (t == 0.0) return x0;
    return expm(Matrix(a * t)) * x0;
}

Vector free_solution(const SymplecticGenerator& gen, const Vector& x0, double t) {
    return free_solution(gen.matrix, x0, t);
}

Vector constant_drive_solution(const SymplecticGenerator& gen, const Vector& x0,
                               const Vector& c_const, double t) {
    const Eigen::Index d = gen.matrix.rows();
    if (x0.size() != d || c_const.size() != d) {
        throw InvalidInputError("constant_drive_solution: dimension mismatch");
    }
    const Matrix eta_m = gen.eta_matrix() * gen.m;
    const double cond = condition_number(eta_m);
    if (!(cond < 1e12)) {
        throw NumericalError(
            "constant_drive_solution: eta*M is singular (condition " + std::to_string(cond) +
            "); integrate the pulse or exponentiate the affine embedding instead");
    }
    const Matrix evol = expm(Matrix(gen.matrix * t));  // e^{-i eta M t}
    const Vector eta_c = gen.apply_eta(c_const);
    const Vector particular = eta_m.partialPivLu().solve(
        Vector((Matrix::Identity(d, d) - evol) * eta_c));
    return evol * x0 - particular;
}

CostBreakdown evaluate_cost_breakdown(const Trajectory& traj, const RealMatrix& q,
                                      const RealMatrix& r, bool half_factor, double t0,
                                      double t1) {
    check_cost_weights(q, r);
    if (!(t1 >= t0)) throw InvalidInputError("evaluate_cost: require t1 >= t0");
    const Matrix qc = q.cast<Complex>();
    const Matrix rc = r.cast<Complex>();
    const bool has_pulse = traj.pulse.controls() > 0;
    if (q.rows() != traj.states.front().size()) {
        throw InvalidInputError("evaluate_cost: Q dimension differs from the state dimension");
    }
    if (has_pulse && r.rows() != traj.pulse.controls()) {
        throw InvalidInputError("evaluate_cost: R dimension differs from the control count");
    }

    static const auto gl = gauss_legendre(16, 0.0, 1.0);
    CostBreakdown out;
    out.half_factor = half_factor;
    for (const auto& seg : traj.dense.segments()) {
        const double lo = std::max(seg.t0, t0);
        const double hi = std::min(seg.t0 + seg.h, t1);
        if (hi <= lo) continue;
        for (std::size_t i = 0; i < gl.first.size(); ++i) {
            const double t = lo + (hi - lo) * gl.first[i];
            const double w = (hi - lo) * gl.second[i];
            const Vector x = traj.dense.at(t);
            out.state_integral += w * std::real(x.dot(qc * x));
            if (has_pulse) {
                const Vector u = traj.pulse(t);
                out.control_integral += w * std::real(u.dot(rc * u));
            }
        }
    }
    out.total = (half_factor ? 0.5 : 1.0) * (out.state_integral + out.control_integral);
    return out;
}

double evaluate_cost(const Trajectory& traj, const RealMatrix& q, const RealMatrix& r,
                     bool half_factor) {
    return evaluate_cost_breakdown(traj, q, r, half_factor, 0.0, traj.dense.t_end()).total;
}

}  // namespace quadctrl
