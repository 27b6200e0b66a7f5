#include "quadctrl/synthesis.hpp"

#include "quadctrl/linalg.hpp"

#include <cmath>
#include <utility>

namespace quadctrl {

namespace {

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r *= static_cast<double>(n - k + i) / i;
    return r;
}

// d^j/dt^j t^n = n!/(n-j)! t^{n-j}, zero for j > n.
double falling_factorial(int n, int j) {
    double r = 1.0;
    for (int i = 0; i < j; ++i) r *= n - i;
    return r;
}

}  // namespace

double BumpFunction::derivative(double t, int k) const {
    if (k < 0) throw InvalidInputError("BumpFunction: negative derivative order");
    if (t < 0.0 || t > horizon_) return 0.0;
    return eval_(t, k);
}

void BumpFunction::validate_invariants() const {
    const double tol = 1e-10;
    for (int l = 0; l < order_; ++l) {
        if (std::abs(eval_(0.0, l)) > tol || std::abs(eval_(horizon_, l)) > tol) {
            throw InvalidInputError("BumpFunction: derivative " + std::to_string(l) +
                                    " does not vanish at the endpoints");
        }
    }
    auto [nodes, weights] = gauss_legendre(64, 0.0, horizon_);
    double mass = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) mass += weights[i] * eval_(nodes[i], 0);
    if (std::abs(mass - 1.0) > tol) {
        throw InvalidInputError("BumpFunction: mass " + std::to_string(mass) +
                                " differs from 1");
    }
}

BumpFunction BumpFunction::custom(int order, double horizon,
                                  std::function<double(double, int)> evaluator,
                                  double normalization, bool validate) {
    if (order < 1 || horizon <= 0.0) {
        throw InvalidInputError("BumpFunction: order >= 1 and horizon > 0 required");
    }
    BumpFunction b;
    b.order_ = order;
    b.horizon_ = horizon;
    b.normalization_ = normalization;
    b.kind_ = Kind::custom_sampled;
    b.eval_ = std::move(evaluator);
    if (validate) b.validate_invariants();
    return b;
}

BumpFunction polynomial_bump(int order, double horizon) {
    if (order < 1) throw InvalidInputError("polynomial_bump: order must be >= 1");
    if (!(horizon > 0.0)) throw InvalidInputError("polynomial_bump: horizon must be positive");
    const int n = order;
    const double T = horizon;
    // int_0^T t^n (T-t)^n dt = T^{2n+1} B(n+1, n+1) = T^{2n+1} (n!)^2/(2n+1)!.
    double beta = 1.0;
    for (int i = 1; i <= n; ++i) beta *= static_cast<double>(i) / (n + i);
    beta /= (2.0 * n + 1.0);
    const double norm = 1.0 / (std::pow(T, 2 * n + 1) * beta);

    BumpFunction b;
    b.order_ = n;
    b.horizon_ = T;
    b.normalization_ = norm;
    b.kind_ = BumpFunction::Kind::polynomial;
    b.eval_ = [n, T, norm](double t, int k) {
        double acc = 0.0;
        for (int j = 0; j <= k; ++j) {
            if (j > n || k - j > n) continue;
            const double left = falling_factorial(n, j) * std::pow(t, n - j);
            const double right = falling_factorial(n, k - j) * std::pow(T - t, n - (k - j)) *
                                 ((k - j) % 2 == 0 ? 1.0 : -1.0);
            acc += binomial(k, j) * left * right;
        }
        return norm * acc;
    };
    return b;
}

ControlPulse::ControlPulse(double horizon, int controls, std::function<Vector(double)> evaluator,
                           PulseProvenance provenance, int derivative_order_available)
    : horizon_(horizon),
      m_(controls),
      provenance_(provenance),
      derivative_order_available_(derivative_order_available),
      eval_(std::move(evaluator)) {
    if (horizon_ <= 0.0 || m_ < 1) {
        throw InvalidInputError("ControlPulse: positive horizon and at least one control");
    }
}

Vector ControlPulse::operator()(double t) const {
    if (t < 0.0 || t > horizon_ || !eval_) return Vector::Zero(m_);
    return eval_(t);
}

ControlPulse ControlPulse::scaled(Complex factor) const {
    auto base = eval_;
    return ControlPulse(
        horizon_, m_, [base, factor](double t) { return Vector(factor * base(t)); }, provenance_,
        derivative_order_available_);
}

double ControlPulse::max_abs_on_grid(int samples) const {
    double peak = 0.0;
    for (int i = 0; i <= samples; ++i) {
        const double t = horizon_ * i / samples;
        peak = std::max(peak, (*this)(t).cwiseAbs().maxCoeff());
    }
    return peak;
}

KbarBlocks kbar_blocks(const LinearControlSystem& sys) {
    KalmanReport report = analyze(sys);
    if (!report.controllable) {
        throw NotControllableError(
            "kbar_blocks: Kalman rank " + std::to_string(report.numerical_rank) + " < " +
                std::to_string(sys.d()),
            std::move(report));
    }
    const Eigen::Index d = sys.d();
    const Eigen::Index m = sys.m();
    const Matrix& k = report.kalman;

    Matrix kbar;
    if (k.rows() == k.cols()) {
        kbar = k.partialPivLu().inverse();
    } else {
        // Minimum-norm right inverse K+ = K^dag (K K^dag)^-1, computed
        // through a rank-revealing orthogonal decomposition rather than the
        // normal equations (those square the conditioning of K).
        kbar = k.completeOrthogonalDecomposition().pseudoInverse();
    }

    KbarBlocks out;
    out.blocks.reserve(static_cast<std::size_t>(d));
    Matrix recon = Matrix::Zero(d, d);
    Matrix al_c = sys.c;  // A^{l-1} C
    for (Eigen::Index l = 0; l < d; ++l) {
        out.blocks.push_back(kbar.middleRows(l * m, m));
        if (l > 0) al_c = sys.a * al_c;
        recon += al_c * out.blocks.back();
    }
    out.reconstruction_residual = max_abs(Matrix(recon - Matrix::Identity(d, d)));
    if (out.reconstruction_residual > 1e-9) {
        throw NumericalError("kbar_blocks: right-inverse residual " +
                             std::to_string(out.reconstruction_residual) + " exceeds 1e-9");
    }
    return out;
}

SteeringKernel::SteeringKernel(const LinearControlSystem& sys, const Vector& x0,
                               const Vector& goal, double horizon, BumpFunction mu)
    : bump_(std::move(mu)), horizon_(horizon) {
    if (x0.size() != sys.d() || goal.size() != sys.d()) {
        throw InvalidInputError("r_function: x0 and goal must have dimension d");
    }
    if (!(horizon > 0.0)) throw InvalidInputError("r_function: horizon must be positive");
    if (std::abs(bump_.horizon() - horizon) > 1e-14 * std::max(1.0, horizon)) {
        throw InvalidInputError("r_function: bump horizon differs from steering horizon");
    }
    propagator_ = std::make_shared<const Propagator>(sys.a);
    v_ = goal - propagator_->apply(horizon, x0);
    a_powers_.reserve(static_cast<std::size_t>(bump_.order()) + 1);
    a_powers_.push_back(Matrix::Identity(sys.d(), sys.d()));
    for (int p = 1; p <= bump_.order(); ++p) a_powers_.push_back(sys.a * a_powers_.back());
}

Vector SteeringKernel::derivative(double t, int k) const {
    if (k < 0 || k > bump_.order()) {
        throw InvalidInputError("r_function: derivative order " + std::to_string(k) +
                                " exceeds available bump derivatives");
    }
    const Vector base = propagator_->apply(t - horizon_, v_);
    Vector out = Vector::Zero(base.size());
    for (int j = 0; j <= k; ++j) {
        out += binomial(k, j) * bump_.derivative(t, j) * (a_powers_[k - j] * base);
    }
    return out;
}

SteeringKernel r_function(const LinearControlSystem& sys, const Vector& x0, const Vector& goal,
                          double horizon, BumpFunction mu) {
    return SteeringKernel(sys, x0, goal, horizon, std::move(mu));
}

ControlPulse synthesize_pulse(const LinearControlSystem& sys, const Vector& x0,
                              const Vector& goal, double horizon, const BumpFunction& mu) {
    const Eigen::Index d = sys.d();
    if (mu.order() < d) {
        throw InvalidInputError("synthesize_pulse: bump order " + std::to_string(mu.order()) +
                                " < state dimension " + std::to_string(d));
    }
    auto blocks = std::make_shared<const KbarBlocks>(kbar_blocks(sys));
    auto kernel = std::make_shared<const SteeringKernel>(sys, x0, goal, horizon, mu);
    const int m = static_cast<int>(sys.m());
    auto eval = [blocks, kernel, d, m](double t) {
        Vector u = Vector::Zero(m);
        for (Eigen::Index l = 0; l < d; ++l) {
            u += blocks->blocks[static_cast<std::size_t>(l)] *
                 kernel->derivative(t, static_cast<int>(l));
        }
        return u;
    };
    return ControlPulse(horizon, m, std::move(eval), PulseProvenance::bump_synthesis, 0);
}

Matrix grammian(const LinearControlSystem& sys, double horizon) {
    if (!(horizon > 0.0)) throw InvalidInputError("grammian: horizon must be positive");
    const Eigen::Index d = sys.d();
    Matrix block = Matrix::Zero(2 * d, 2 * d);
    block.topLeftCorner(d, d) = sys.a;
    block.topRightCorner(d, d) = sys.c * sys.c.adjoint();
    block.bottomRightCorner(d, d) = -sys.a.adjoint();
    const Matrix e = expm(Matrix(block * horizon));
    Matrix q = e.topRightCorner(d, d) * e.topLeftCorner(d, d).adjoint();
    const double herm_defect = max_abs(Matrix(q - q.adjoint().eval()));
    if (herm_defect > 1e-12 * std::max(1.0, max_abs(q))) {
        throw NumericalError("grammian: Hermiticity defect " + std::to_string(herm_defect));
    }
    return 0.5 * (q + q.adjoint().eval());
}

MinEffortPulse min_effort_pulse(const LinearControlSystem& sys, const Vector& x0,
                                const Vector& goal, double horizon) {
    if (x0.size() != sys.d() || goal.size() != sys.d()) {
        throw InvalidInputError("min_effort_pulse: x0 and goal must have dimension d");
    }
    const Matrix q = grammian(sys, horizon);
    const double cond = condition_number(q);
    if (!(cond < 1e12)) {
        throw NumericalError(
            "min_effort_pulse: Grammian condition number " + std::to_string(cond) +
            " exceeds 1e12 (system uncontrollable or nearly so on this horizon)");
    }
    auto propagator = std::make_shared<const Propagator>(sys.a);
    const Vector delta = propagator->apply(horizon, x0) - goal;
    const Vector w = q.ldlt().solve(delta);

    MinEffortPulse out;
    out.grammian_condition = cond;
    out.predicted_cost = std::real(delta.dot(w));
    const Matrix c_adj = sys.c.adjoint();
    auto propagator_adj = std::make_shared<const Propagator>(Matrix(sys.a.adjoint()));
    const int m = static_cast<int>(sys.m());
    auto eval = [propagator_adj, c_adj, w, horizon](double t) {
        return Vector(-(c_adj * propagator_adj->apply(horizon - t, w)));
    };
    out.pulse = ControlPulse(horizon, m, std::move(eval), PulseProvenance::min_effort, 0);
    return out;
}

ControlPulse physical_drive_from_control(const ControlPulse& pulse,
                                         const SymplecticGenerator& gen, double tol) {
    const int n = gen.n_modes;
    if (pulse.controls() != 2 * n) {
        throw InvalidInputError(
            "physical_drive_from_control: pulse must carry the full 2n control vector");
    }
    // Spot-check the conjugate-pair symmetry u_{n+k} = conj(u_k).
    for (int i = 1; i <= 7; ++i) {
        const Vector u = pulse(pulse.horizon() * i / 8.0);
        for (int k = 0; k < n; ++k) {
            if (std::abs(u(n + k) - std::conj(u(k))) > tol) {
                throw NumericalError(
                    "physical_drive_from_control: conjugate-pair symmetry violated");
            }
        }
    }
    const RealVector eta = gen.eta;
    return ControlPulse(
        pulse.horizon(), 2 * n,
        [pulse, eta](double t) {
            return Vector(kImag * (eta.cast<Complex>().asDiagonal() * pulse(t)));
        },
        pulse.provenance(), 0);
}

const char* to_string(PulseProvenance p) {
    switch (p) {
        case PulseProvenance::bump_synthesis: return "bump_synthesis";
        case PulseProvenance::min_effort: return "min_effort";
        case PulseProvenance::lqr: return "lqr";
        case PulseProvenance::user: return "user";
    }
    return "unknown";
}

}  // namespace quadctrl
