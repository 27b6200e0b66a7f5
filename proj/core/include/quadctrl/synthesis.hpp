// Explicit control-pulse construction: bump-kernel steering pulses built
// from a right inverse of the Kalman matrix, and Grammian minimum-effort
// pulses.
#pragma once

#include "quadctrl/controllability.hpp"
#include "quadctrl/model.hpp"

#include <functional>
#include <memory>
#include <vector>

namespace quadctrl {

/// Smooth kernel on [0, T]: integrates to one and vanishes, together with
/// its first (order - 1) derivatives, at both endpoints.
class BumpFunction {
  public:
    enum class Kind { polynomial, custom_sampled };

    int order() const { return order_; }
    double horizon() const { return horizon_; }
    double normalization() const { return normalization_; }
    Kind kind() const { return kind_; }

    /// k-th derivative at t; zero outside [0, T].
    double derivative(double t, int k) const;
    double operator()(double t) const { return derivative(t, 0); }

    /// Wraps a caller-supplied evaluator. Endpoint-vanishing and unit-mass
    /// invariants are verified by quadrature unless validate is false (a
    /// deliberately non-conforming kernel can then still be experimented
    /// with).
    static BumpFunction custom(int order, double horizon,
                               std::function<double(double, int)> evaluator,
                               double normalization = 1.0, bool validate = true);

  private:
    friend BumpFunction polynomial_bump(int order, double horizon);
    BumpFunction() = default;
    void validate_invariants() const;

    int order_ = 0;
    double horizon_ = 0.0;
    double normalization_ = 1.0;
    Kind kind_ = Kind::polynomial;
    std::function<double(double, int)> eval_;
};

/// mu(t) = N t^n (T - t)^n with N fixed in closed form through the Beta
/// integral; derivatives of any order come from the Leibniz rule on the two
/// polynomial factors.
BumpFunction polynomial_bump(int order, double horizon);

enum class PulseProvenance { bump_synthesis, min_effort, lqr, user };

/// Time-dependent m-component control; evaluations outside [0, T] are zero.
class ControlPulse {
  public:
    ControlPulse() = default;
    ControlPulse(double horizon, int controls, std::function<Vector(double)> evaluator,
                 PulseProvenance provenance, int derivative_order_available = 0);

    double horizon() const { return horizon_; }
    int controls() const { return m_; }
    PulseProvenance provenance() const { return provenance_; }
    int derivative_order_available() const { return derivative_order_available_; }

    Vector operator()(double t) const;

    /// Pulse with every value multiplied by a constant phase/scale factor.
    ControlPulse scaled(Complex factor) const;

    /// max_k |u(t_k)| over a uniform sampling grid.
    double max_abs_on_grid(int samples) const;

  private:
    double horizon_ = 0.0;
    int m_ = 0;
    PulseProvenance provenance_ = PulseProvenance::user;
    int derivative_order_available_ = 0;
    std::function<Vector(double)> eval_;
};

/// Right inverse of the Kalman matrix, split into the m x d blocks that
/// multiply successive derivatives of the steering kernel.
struct KbarBlocks {
    std::vector<Matrix> blocks;      // d blocks, each m x d
    double reconstruction_residual;  // |sum_l A^{l-1} C Kbar_l - I|_max
};

/// Thrown when pulse construction is requested for a system whose Kalman
/// matrix is rank deficient; carries the analysis that proves it.
class NotControllableError : public std::runtime_error {
  public:
    NotControllableError(std::string what, KalmanReport report)
        : std::runtime_error(std::move(what)), report(std::move(report)) {}
    KalmanReport report;
};

/// K^-1 for square K (single control); otherwise the minimum-norm right
/// inverse K+ = K^dag (K K^dag)^-1, partitioned into m x d blocks.
KbarBlocks kbar_blocks(const LinearControlSystem& sys);

/// Steering kernel r(t) = mu(t) e^{A(t-T)} (g - e^{AT} x0) and its exact
/// derivatives d^k r = sum_j binom(k,j) mu^(j) A^{k-j} e^{A(t-T)} v.
/// No finite differencing: the construction needs the endpoint zeros of the
/// derivatives to survive exactly.
class SteeringKernel {
  public:
    SteeringKernel(const LinearControlSystem& sys, const Vector& x0, const Vector& goal,
                   double horizon, BumpFunction mu);

    Vector derivative(double t, int k) const;
    Vector operator()(double t) const { return derivative(t, 0); }
    int max_derivative_order() const { return bump_.order(); }
    const Vector& shift() const { return v_; }

  private:
    BumpFunction bump_;
    double horizon_;
    Vector v_;
    std::vector<Matrix> a_powers_;
    std::shared_ptr<const Propagator> propagator_;
};

SteeringKernel r_function(const LinearControlSystem& sys, const Vector& x0, const Vector& goal,
                          double horizon, BumpFunction mu);

/// u(t) = sum_{l=1..d} Kbar_l d^{l-1} r / dt^{l-1}; steers x0 to goal at T.
/// Requires mu.order >= d so every derivative used vanishes at the endpoints.
ControlPulse synthesize_pulse(const LinearControlSystem& sys, const Vector& x0,
                              const Vector& goal, double horizon, const BumpFunction& mu);

/// Controllability Grammian Q_T = int_0^T e^{As} C C^dag e^{A^dag s} ds via
/// the block exponential of [[A, C C^dag], [0, -A^dag]].
Matrix grammian(const LinearControlSystem& sys, double horizon);

struct MinEffortPulse {
    ControlPulse pulse;
    double predicted_cost = 0.0;     // <Q_T^-1 delta, delta>
    double grammian_condition = 0.0;
};

/// Minimum-effort steering control u(t) = -C^dag e^{A^dag (T-t)} Q_T^-1
/// (e^{AT} x0 - g). Fails when the Grammian condition number exceeds 1e12.
MinEffortPulse min_effort_pulse(const LinearControlSystem& sys, const Vector& x0,
                                const Vector& goal, double horizon);

/// Mode-basis physical drive recovered from a full-width control vector:
/// c(t) = i eta u(t). Checks the conjugate-pair symmetry u_{n+k} = conj(u_k)
/// within tol.
ControlPulse physical_drive_from_control(const ControlPulse& pulse,
                                         const SymplecticGenerator& gen, double tol = 1e-10);

const char* to_string(PulseProvenance p);

}  // namespace quadctrl
