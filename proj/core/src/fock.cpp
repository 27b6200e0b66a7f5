#include "quadctrl/fock.hpp"

#include "quadctrl/dynamics.hpp"
#include "quadctrl/linalg.hpp"
#include "quadctrl/lqr.hpp"

#include <cmath>
#include <random>

namespace quadctrl {

double FockState::leakage() const {
    const int n = dim();
    if (n < 2) return std::norm(amplitudes(n - 1));
    return std::norm(amplitudes(n - 1)) + std::norm(amplitudes(n - 2));
}

Complex FockState::expectation(const Matrix& op) const {
    return amplitudes.dot(op * amplitudes);
}

double FockState::fidelity(const FockState& other) const {
    const Complex overlap = amplitudes.dot(other.amplitudes);
    return std::norm(overlap);
}

FockState FockState::vacuum(int dim) {
    if (dim < 2) throw InvalidInputError("FockState: need at least two levels");
    FockState s;
    s.amplitudes = Vector::Zero(dim);
    s.amplitudes(0) = 1.0;
    return s;
}

FockOperators FockOperators::create(int dim) {
    if (dim < 2) throw InvalidInputError("FockOperators: need at least two levels");
    FockOperators ops;
    ops.a = Matrix::Zero(dim, dim);
    for (int k = 1; k < dim; ++k) ops.a(k - 1, k) = std::sqrt(static_cast<double>(k));
    ops.a_dagger = ops.a.adjoint();
    ops.number = ops.a_dagger * ops.a;
    const double s = 1.0 / std::sqrt(2.0);
    ops.x = s * (ops.a + ops.a_dagger);
    ops.p = kImag * s * (ops.a_dagger - ops.a);
    return ops;
}

bool coherent_truncation_adequate(Complex beta, int dim) {
    return std::norm(beta) < dim / 4.0;
}

FockState coherent_state(Complex beta, int dim) {
    FockState s;
    s.amplitudes.resize(dim);
    // amplitudes b^k / sqrt(k!) built recursively to avoid overflow.
    Complex term = 1.0;
    s.amplitudes(0) = term;
    for (int k = 1; k < dim; ++k) {
        term *= beta / std::sqrt(static_cast<double>(k));
        s.amplitudes(k) = term;
    }
    s.amplitudes *= std::exp(-0.5 * std::norm(beta));
    s.amplitudes.normalize();  // truncation renormalization
    return s;
}

Matrix displacement_operator(Complex beta, int dim) {
    const FockOperators ops = FockOperators::create(dim);
    return expm(Matrix(beta * ops.a_dagger - std::conj(beta) * ops.a));
}

FockState schrodinger_fixed_steps(const std::function<Matrix(double)>& hamiltonian,
                                  const FockState& psi0, double horizon, long steps) {
    if (steps < 1) throw InvalidInputError("schrodinger_fixed_steps: steps must be positive");
    const double dt = horizon / static_cast<double>(steps);
    Vector psi = psi0.amplitudes;
    for (long k = 0; k < steps; ++k) {
        const double t_mid = (static_cast<double>(k) + 0.5) * dt;
        Matrix h = hamiltonian(t_mid);
        if (h.rows() != psi.size() || h.cols() != psi.size()) {
            throw InvalidInputError("schrodinger_fixed_steps: Hamiltonian dimension mismatch");
        }
        h = 0.5 * (h + h.adjoint().eval());
        Eigen::SelfAdjointEigenSolver<Matrix> es(h);
        if (es.info() != Eigen::Success) {
            throw NumericalError("schrodinger_fixed_steps: eigensolve failed at t = " +
                                 std::to_string(t_mid));
        }
        const Vector phases =
            (-kImag * es.eigenvalues().cast<Complex>().array() * dt).exp().matrix();
        psi = es.eigenvectors() * (phases.asDiagonal() * (es.eigenvectors().adjoint() * psi));
    }
    return FockState{std::move(psi)};
}

SchrodingerResult schrodinger_propagate(const std::function<Matrix(double)>& hamiltonian,
                                        const FockState& psi0, double horizon,
                                        const SchrodingerOptions& opts) {
    if (!(horizon > 0.0)) throw InvalidInputError("schrodinger_propagate: horizon must be > 0");
    long steps = std::max<long>(2, opts.initial_steps);
    FockState coarse = schrodinger_fixed_steps(hamiltonian, psi0, horizon, steps);
    SchrodingerResult result;
    for (int iter = 0; iter <= opts.max_doublings; ++iter) {
        const FockState fine = schrodinger_fixed_steps(hamiltonian, psi0, horizon, 2 * steps);
        const double agreement = std::abs(1.0 - std::abs(coarse.amplitudes.dot(fine.amplitudes)));
        if (agreement <= opts.agreement) {
            result.state = fine;
            result.steps = 2 * steps;
            result.agreement = agreement;
            result.leakage = fine.leakage();
            result.norm_drift = std::abs(fine.norm() - psi0.norm());
            if (result.leakage > opts.max_leakage) {
                throw NumericalError("schrodinger_propagate: leakage " +
                                     std::to_string(result.leakage) +
                                     " exceeds the truncation budget; enlarge the Fock space");
            }
            return result;
        }
        coarse = std::move(fine);
        steps *= 2;
    }
    throw NumericalError("schrodinger_propagate: step doubling did not converge to " +
                         std::to_string(opts.agreement) + " within the doubling budget");
}

DisplacementCheck displacement_theorem_check(const QuadraticHamiltonian& h,
                                             const std::function<Complex(double)>& drive,
                                             double horizon, int dim,
                                             const SchrodingerOptions& opts) {
    if (h.n_modes != 1) {
        throw InvalidInputError("displacement_theorem_check: single-mode Hamiltonians only");
    }
    const FockOperators ops = FockOperators::create(dim);
    const Complex g = h.g(0, 0);
    const Complex b = h.b(0, 0);
    const Matrix h0 = g * ops.number + 0.5 * b * (ops.a_dagger * ops.a_dagger) +
                      0.5 * std::conj(b) * (ops.a * ops.a);

    auto ht = [&](double t) {
        const Complex c = drive(t);
        return Matrix(h0 + c * ops.a_dagger + std::conj(c) * ops.a);
    };

    const FockState psi0 = FockState::vacuum(dim);
    const SchrodingerResult run = schrodinger_propagate(ht, psi0, horizon, opts);

    // Classical first-moment propagation of the same drive.
    const SymplecticGenerator gen = build_generator(h);
    const LinearControlSystem sys =
        LinearControlSystem::create(gen.matrix, Matrix::Identity(2, 2), BasisTag::mode_basis);
    ControlPulse pulse(
        horizon, 2,
        [drive, gen](double t) {
            Vector c(2);
            c << drive(t), std::conj(drive(t));
            return Vector(-kImag * gen.apply_eta(c));
        },
        PulseProvenance::user, 0);
    const Trajectory traj = propagate(sys, pulse, Vector::Zero(2), horizon);

    DisplacementCheck check;
    check.shift = traj.final_state()(0);  // x0 = 0, so the endpoint is the shift itself
    check.leakage = run.leakage;
    check.steps = run.steps;

    const Matrix u_free = expm(Matrix(-kImag * h0 * horizon));
    const Vector reference =
        displacement_operator(check.shift, dim) * (u_free * psi0.amplitudes);
    check.fidelity = std::norm(reference.dot(run.state.amplitudes)) / reference.squaredNorm();
    return check;
}

ConditionalDisplacementRun conditional_displacement_run(
    double chi, const std::function<Complex(double)>& drive, double horizon, Complex beta,
    int dim, const SchrodingerOptions& opts) {
    const FockOperators ops = FockOperators::create(dim);
    ConditionalDisplacementRun out;
    const FockState psi0 = FockState::vacuum(dim);
    for (int sign : {+1, -1}) {
        auto ht = [&, sign](double t) {
            const Complex u = drive(t);
            return Matrix(sign * 0.5 * chi * ops.number + u * ops.a_dagger +
                          std::conj(u) * ops.a);
        };
        const SchrodingerResult run = schrodinger_propagate(ht, psi0, horizon, opts);
        const Complex endpoint = run.state.expectation(ops.a);
        // The vacuum is stationary under a+a, so the displaced state is a
        // plain coherent state at the branch target.
        const FockState target = coherent_state(sign > 0 ? 0.5 * beta : -0.5 * beta, dim);
        if (sign > 0) {
            out.endpoint_plus = endpoint;
            out.fidelity_plus = run.state.fidelity(target);
        } else {
            out.endpoint_minus = endpoint;
            out.fidelity_minus = run.state.fidelity(target);
        }
        out.leakage = std::max(out.leakage, run.leakage);
        out.steps = std::max(out.steps, run.steps);
    }
    return out;
}

std::vector<DisplacementPropertyCase> displacement_theorem_property(std::uint64_t seed, int count,
                                                                    int dim, double horizon) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * u01(rng); };

    std::vector<DisplacementPropertyCase> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        DisplacementPropertyCase c;
        c.g = uniform(0.6, 1.6);
        const double b_mag = uniform(0.0, 0.35 * c.g);  // keep M positive definite
        const double b_phase = uniform(0.0, 2.0 * M_PI);
        c.b = b_mag * std::exp(kImag * b_phase);
        c.drive_a = Complex(uniform(-0.7, 0.7), uniform(-0.7, 0.7));
        c.drive_b = Complex(uniform(-0.7, 0.7), uniform(-0.7, 0.7));

        Matrix g(1, 1), b(1, 1);
        g(0, 0) = c.g;
        b(0, 0) = c.b;
        const QuadraticHamiltonian h = QuadraticHamiltonian::create(1, g, b, {true});
        const Complex da = c.drive_a, db = c.drive_b;
        auto drive = [da, db, horizon](double t) {
            return da * std::sin(M_PI * t / horizon) + db * std::sin(2.0 * M_PI * t / horizon);
        };
        c.check = displacement_theorem_check(h, drive, horizon, dim);
        out.push_back(std::move(c));
    }
    return out;
}

TransportFidelityResult transport_fidelity_experiment(double delta, double q_over_r,
                                                      double target_x, double target_p,
                                                      double horizon, int dim,
                                                      const SchrodingerOptions& opts) {
    if (!(q_over_r > 0.0)) {
        throw InvalidInputError("transport_fidelity_experiment: q/r must be positive");
    }
    // Linear oscillator in the quadrature basis; the drive u(t)(a + a+)
    // enters the momentum row with weight -sqrt(2).
    RealMatrix a(2, 2);
    a << 0.0, 1.0, -1.0, 0.0;
    RealMatrix c(2, 1);
    c << 0.0, 1.0;
    LinearControlSystem sys =
        LinearControlSystem::create(a.cast<Complex>(), c.cast<Complex>(), BasisTag::quadrature_basis);

    RealVector x0 = RealVector::Zero(2);
    RealVector xt(2);
    xt << target_x, target_p;
    LQRProblem problem = LQRProblem::create(
        sys, q_over_r * RealMatrix::Identity(2, 2), RealMatrix::Identity(1, 1), x0, xt, horizon);
    const LQRSolution sol = solve_bvp(problem);

    TransportFidelityResult out;
    out.linear_endpoint_error = (sol.trajectory.final_state() - xt.cast<Complex>()).norm();

    const ControlPulse pulse = sol.control;
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    auto u_phys = [pulse, inv_sqrt2](double t) { return -inv_sqrt2 * pulse(t)(0).real(); };

    const FockOperators ops = FockOperators::create(dim);
    const Matrix anharmonic =
        ops.a_dagger * ops.a_dagger * ops.a * ops.a;
    const Matrix x_op = ops.a + ops.a_dagger;
    auto ht = [&, delta](double t) {
        return Matrix(ops.number + 0.5 * delta * anharmonic + u_phys(t) * x_op);
    };

    const SchrodingerResult run =
        schrodinger_propagate(ht, FockState::vacuum(dim), horizon, opts);
    const Complex alpha_target = (target_x + kImag * target_p) * inv_sqrt2;
    out.fidelity = run.state.fidelity(coherent_state(alpha_target, dim));
    out.leakage = run.leakage;
    out.steps = run.steps;
    return out;
}

}  // namespace quadctrl
