#include "quadctrl/lqr.hpp"

#include "quadctrl/linalg.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <thread>

namespace quadctrl {

LQRProblem LQRProblem::create(LinearControlSystem sys, RealMatrix q, RealMatrix r, RealVector x0,
                              RealVector x_target, double horizon) {
    const auto d = sys.d();
    const auto m = sys.m();
    if (!sys.is_real()) throw InvalidInputError("LQRProblem: system must be real-valued");
    if (q.rows() != d || q.cols() != d) throw InvalidInputError("LQRProblem: Q must be d x d");
    if (r.rows() != m || r.cols() != m) throw InvalidInputError("LQRProblem: R must be m x m");
    if (max_abs(RealMatrix(q - q.transpose())) > 1e-12 ||
        max_abs(RealMatrix(r - r.transpose())) > 1e-12) {
        throw InvalidInputError("LQRProblem: Q and R must be symmetric");
    }
    Eigen::SelfAdjointEigenSolver<RealMatrix> eq(q);
    if (eq.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, max_abs(q))) {
        throw InvalidInputError("LQRProblem: Q must be positive semidefinite");
    }
    Eigen::SelfAdjointEigenSolver<RealMatrix> er(r);
    if (er.eigenvalues().minCoeff() <= 0.0) {
        throw InvalidInputError("LQRProblem: R must be positive definite");
    }
    if (x0.size() != d || x_target.size() != d) {
        throw InvalidInputError("LQRProblem: boundary states must have dimension d");
    }
    if (!(horizon > 0.0)) throw InvalidInputError("LQRProblem: horizon must be positive");
    return LQRProblem{std::move(sys), std::move(q), std::move(r), std::move(x0),
                      std::move(x_target), horizon};
}

namespace {

struct BvpCore {
    RealMatrix h;                  // 2d x 2d block generator
    std::vector<RealVector> z_at;  // z at the start of each segment
    double seg_length = 0.0;
    int segments = 1;
    double condition = 0.0;
    std::shared_ptr<const Propagator> prop;  // e^{H tau} within a segment
    Eigen::Index d = 0;

    RealVector z(double t) const {
        const int k = std::min(static_cast<int>(t / seg_length), segments - 1);
        const Vector zi = prop->apply(t - k * seg_length, z_at[static_cast<std::size_t>(k)]
                                                              .cast<Complex>());
        return zi.real();
    }
};

double qr_condition_estimate(const Eigen::ColPivHouseholderQR<RealMatrix>& qr) {
    const auto diag = qr.matrixR().diagonal().cwiseAbs();
    const double dmin = diag.minCoeff();
    if (dmin == 0.0) return std::numeric_limits<double>::infinity();
    return diag.maxCoeff() / dmin;
}

BvpCore solve_boundary_system(const LQRProblem& p) {
    const Eigen::Index d = p.sys.d();
    const RealMatrix a = p.sys.a.real();
    const RealMatrix c = p.sys.c.real();
    const RealMatrix r_inv_ct = p.r.ldlt().solve(c.transpose());

    BvpCore core;
    core.d = d;
    core.h.resize(2 * d, 2 * d);
    core.h.topLeftCorner(d, d) = a;
    core.h.topRightCorner(d, d) = -c * r_inv_ct;
    core.h.bottomLeftCorner(d, d) = -p.q;
    core.h.bottomRightCorner(d, d) = -a.transpose();

    // Split the horizon so no segment propagator grows past ~e^10; the
    // single-shot e^{HT} loses the stable directions long before overflow.
    const Eigen::VectorXcd eigs = core.h.eigenvalues();
    const double max_growth = eigs.real().cwiseAbs().maxCoeff();
    core.segments = std::max(1, static_cast<int>(std::ceil(max_growth * p.horizon / 10.0)));
    core.seg_length = p.horizon / core.segments;

    const RealMatrix e = expm(RealMatrix(core.h * core.seg_length));
    const int n = static_cast<int>(2 * d);
    const int nseg = core.segments;

    if (nseg == 1) {
        const RealMatrix phi11 = e.topLeftCorner(d, d);
        const RealMatrix phi12 = e.topRightCorner(d, d);
        Eigen::ColPivHouseholderQR<RealMatrix> qr(phi12);
        core.condition = qr_condition_estimate(qr);
        if (!(core.condition < 1e12)) {
            throw NumericalError("solve_bvp: boundary block is singular (condition estimate " +
                                 std::to_string(core.condition) +
                                 "); the system is uncontrollable or at a conjugate point");
        }
        const RealVector lambda0 = qr.solve(p.x_target - phi11 * p.x0);
        RealVector z0(n);
        z0 << p.x0, lambda0;
        core.z_at = {z0};
    } else {
        // Unknowns: z at each segment start. Equations: x-part of z_0 fixed,
        // continuity z_{k+1} = E z_k, x-part of E z_{last} hits the target.
        const int big = nseg * n;
        RealMatrix sys_mat = RealMatrix::Zero(big, big);
        RealVector rhs = RealVector::Zero(big);
        sys_mat.topLeftCorner(d, d).setIdentity();
        rhs.head(d) = p.x0;
        int row = static_cast<int>(d);
        for (int k = 0; k + 1 < nseg; ++k) {
            sys_mat.block(row, k * n, n, n) = e;
            sys_mat.block(row, (k + 1) * n, n, n) = -RealMatrix::Identity(n, n);
            row += n;
        }
        sys_mat.block(row, (nseg - 1) * n, d, n) = e.topRows(d);
        rhs.segment(row, d) = p.x_target;

        Eigen::ColPivHouseholderQR<RealMatrix> qr(sys_mat);
        core.condition = qr_condition_estimate(qr);
        if (!(core.condition < 1e12)) {
            throw NumericalError("solve_bvp: boundary system is singular (condition estimate " +
                                 std::to_string(core.condition) + ")");
        }
        const RealVector z = qr.solve(rhs);
        core.z_at.reserve(static_cast<std::size_t>(nseg));
        for (int k = 0; k < nseg; ++k) core.z_at.push_back(z.segment(k * n, n));
    }
    core.prop = std::make_shared<const Propagator>(core.h.cast<Complex>());
    return core;
}

}  // namespace

LQRSolution solve_bvp(const LQRProblem& p) {
    const Eigen::Index d = p.sys.d();
    auto core = std::make_shared<const BvpCore>(solve_boundary_system(p));

    LQRSolution sol;
    sol.lambda0 = core->z_at.front().tail(d);
    sol.bvp_condition = core->condition;
    sol.segments = core->segments;

    const RealMatrix r_inv_ct = p.r.ldlt().solve(RealMatrix(p.sys.c.real().transpose()));
    const int m = static_cast<int>(p.sys.m());
    sol.control = ControlPulse(
        p.horizon, m,
        [core, r_inv_ct, d](double t) {
            const RealVector lambda = core->z(t).tail(d);
            return Vector((-r_inv_ct * lambda).cast<Complex>());
        },
        PulseProvenance::lqr, 0);
    sol.state_analytic = [core, d](double t) { return RealVector(core->z(t).head(d)); };
    sol.costate = [core, d](double t) { return RealVector(core->z(t).tail(d)); };

    sol.trajectory = propagate(p.sys, sol.control, p.x0.cast<Complex>(), p.horizon);
    sol.cost = evaluate_cost(sol.trajectory, p.q, p.r, /*half_factor=*/true);

    const double endpoint_err =
        (sol.trajectory.final_state() - p.x_target.cast<Complex>()).norm();
    if (endpoint_err > 1e-6 * (1.0 + p.x_target.norm())) {
        throw NumericalError("solve_bvp: endpoint error " + std::to_string(endpoint_err) +
                             " exceeds the solution contract");
    }
    return sol;
}

double PontryaginResiduals::max() const { return std::max({state, adjoint, control}); }

PontryaginResiduals pontryagin_residuals(const LQRProblem& p, const LQRSolution& sol,
                                         int samples) {
    PontryaginResiduals res;
    const Eigen::Index d = p.sys.d();
    const RealMatrix a = p.sys.a.real();
    const RealMatrix c = p.sys.c.real();
    const RealMatrix r_inv_ct = p.r.ldlt().solve(RealMatrix(c.transpose()));

    // State equation: the adaptively integrated trajectory against the
    // analytic transition-matrix state.
    for (int i = 0; i <= samples; ++i) {
        const double t = p.horizon * i / samples;
        const RealVector xa = sol.state_analytic(t);
        const Vector xi = (t == 0.0) ? sol.trajectory.states.front() : sol.trajectory.dense.at(t);
        res.state = std::max(res.state, (xi.real() - xa).cwiseAbs().maxCoeff());
    }

    // Adjoint equation: re-integrate lambda' = -Q x(t) - A^T lambda from
    // lambda0 with the generic integrator and compare against the costate.
    auto state_an = sol.state_analytic;
    auto rhs = [&](double t, const Vector& lam, Vector& dl) {
        dl = (-(p.q * state_an(t)) - a.transpose() * lam.real()).cast<Complex>();
    };
    IntegrationOptions iopts;
    iopts.rel_tol = 1e-11;
    iopts.abs_tol = 1e-13;
    const DenseSolution lam_sol =
        integrate_dopri5(rhs, sol.lambda0.cast<Complex>(), 0.0, p.horizon, iopts);
    for (int i = 0; i <= samples; ++i) {
        const double t = p.horizon * i / samples;
        const RealVector lam_rk = lam_sol.at(t).real();
        res.adjoint = std::max(res.adjoint, (lam_rk - sol.costate(t)).cwiseAbs().maxCoeff());
        const RealVector u_from_lam = -r_inv_ct * lam_rk;
        const Vector u = sol.control(t);
        res.control = std::max(res.control, (u.real() - u_from_lam).cwiseAbs().maxCoeff());
    }
    return res;
}

namespace {

int thread_cap() {
    if (const char* env = std::getenv("QUADCTRL_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace

std::vector<SweepPoint> weight_sweep(const LQRProblem& problem_template,
                                     const std::vector<double>& q_values) {
    for (double q : q_values) {
        if (q < 0.0) throw InvalidInputError("weight_sweep: weights must be nonnegative");
    }
    std::vector<SweepPoint> out(q_values.size());
    const Eigen::Index d = problem_template.sys.d();

    auto run_point = [&](std::size_t i) {
        SweepPoint& pt = out[i];
        pt.q_weight = q_values[i];
        try {
            LQRProblem p = problem_template;
            p.q = q_values[i] * RealMatrix::Identity(d, d);
            const LQRSolution sol = solve_bvp(p);
            pt.cost = sol.cost;
            pt.ok = true;
        } catch (const std::exception& e) {
            pt.ok = false;
            pt.error = e.what();
        }
    };

    const int workers = std::min<int>(thread_cap(), static_cast<int>(q_values.size()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < q_values.size(); ++i) run_point(i);
    } else {
        std::vector<std::thread> pool;
        std::atomic<std::size_t> next{0};
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                while (true) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= q_values.size()) break;
                    run_point(i);
                }
            });
        }
        for (auto& th : pool) th.join();
    }
    return out;
}

LinearControlSystem complex_to_real_embedding(const LinearControlSystem& sys) {
    const Eigen::Index d = sys.d();
    const Eigen::Index m = sys.m();
    RealMatrix a(2 * d, 2 * d), c(2 * d, 2 * m);
    a.topLeftCorner(d, d) = sys.a.real();
    a.topRightCorner(d, d) = -sys.a.imag();
    a.bottomLeftCorner(d, d) = sys.a.imag();
    a.bottomRightCorner(d, d) = sys.a.real();
    c.topLeftCorner(d, m) = sys.c.real();
    c.topRightCorner(d, m) = -sys.c.imag();
    c.bottomLeftCorner(d, m) = sys.c.imag();
    c.bottomRightCorner(d, m) = sys.c.real();
    return LinearControlSystem::create(a.cast<Complex>(), c.cast<Complex>(), BasisTag::custom);
}

RealVector embed_complex_vector(const Vector& x) {
    RealVector out(2 * x.size());
    out << x.real(), x.imag();
    return out;
}

Vector unembed_real_vector(const RealVector& x) {
    const Eigen::Index d = x.size() / 2;
    if (x.size() % 2 != 0) throw InvalidInputError("unembed_real_vector: odd length");
    return x.head(d) + kImag * x.tail(d);
}

}  // namespace quadctrl
