// Truncated-Fock-space simulation used to verify the operator-level claims:
// linear drives act as displacements, conditional displacement of a cavity
// by a dispersively coupled qubit, and transport fidelity under an
// anharmonic perturbation.
#pragma once

#include "quadctrl/model.hpp"
#include "quadctrl/synthesis.hpp"

#include <functional>

namespace quadctrl {

struct FockState {
    Vector amplitudes;

    int dim() const { return static_cast<int>(amplitudes.size()); }
    double norm() const { return amplitudes.norm(); }
    /// Probability weight in the top two levels; the truncation-adequacy
    /// measure reported with every run.
    double leakage() const;
    Complex expectation(const Matrix& op) const;
    /// Squared overlap magnitude; global phase is ignored throughout.
    double fidelity(const FockState& other) const;

    static FockState vacuum(int dim);
};

/// Ladder-operator matrices at truncation dim.
struct FockOperators {
    Matrix a;
    Matrix a_dagger;
    Matrix number;
    Matrix x;
    Matrix p;

    static FockOperators create(int dim);
    int dim() const { return static_cast<int>(a.rows()); }
};

/// Truncation-adequacy heuristic for coherent amplitudes: |beta|^2 < dim/4.
bool coherent_truncation_adequate(Complex beta, int dim);

/// Coherent state e^{-|b|^2/2} b^k/sqrt(k!), renormalized after truncation.
FockState coherent_state(Complex beta, int dim);

/// exp(beta a+ - conj(beta) a); unitary away from the truncation edge.
Matrix displacement_operator(Complex beta, int dim);

struct SchrodingerOptions {
    long initial_steps = 1024;
    double agreement = 1e-8;    // fidelity agreement between step-doubled runs
    double max_leakage = 1e-4;  // truncation-too-small abort threshold
    int max_doublings = 14;
};

struct SchrodingerResult {
    FockState state;
    long steps = 0;          // step count of the converged run
    double agreement = 0.0;  // 1 - |<psi_n|psi_2n>| at convergence
    double leakage = 0.0;
    double norm_drift = 0.0;
};

/// Piecewise propagation psi <- exp(-i H(t_mid) dt) psi with automatic step
/// doubling until two consecutive runs agree to the requested fidelity.
/// Leakage above max_leakage aborts with a truncation-too-small diagnosis.
SchrodingerResult schrodinger_propagate(const std::function<Matrix(double)>& hamiltonian,
                                        const FockState& psi0, double horizon,
                                        const SchrodingerOptions& opts = {});

/// Single fixed-step run (no convergence ladder); building block of the
/// step-doubling loop, exposed for callers that manage accuracy themselves.
FockState schrodinger_fixed_steps(const std::function<Matrix(double)>& hamiltonian,
                                  const FockState& psi0, double horizon, long steps);

struct DisplacementCheck {
    double fidelity = 0.0;     // |<D(shift) U_free psi0 | psi(T)>|^2
    Complex shift;             // classically predicted displacement
    double leakage = 0.0;
    long steps = 0;
};

/// Verifies that a driven single-mode quadratic Hamiltonian acts on the full
/// quantum state as free evolution followed by the classically predicted
/// displacement. drive(t) is the coefficient of a+ in the Hamiltonian.
DisplacementCheck displacement_theorem_check(const QuadraticHamiltonian& h,
                                             const std::function<Complex(double)>& drive,
                                             double horizon, int dim,
                                             const SchrodingerOptions& opts = {});

struct ConditionalDisplacementRun {
    Complex endpoint_plus;   // <a>(T) for the qubit-up branch
    Complex endpoint_minus;  // <a>(T) for the qubit-down branch
    double fidelity_plus = 0.0;   // overlap with the coherent target +beta/2
    double fidelity_minus = 0.0;  // overlap with the coherent target -beta/2
    double leakage = 0.0;
    long steps = 0;
};

/// Runs the two qubit-conditioned branches H = +-(chi/2) a+a + u(t) a+ +
/// conj(u(t)) a as independent single-mode simulations from the vacuum.
ConditionalDisplacementRun conditional_displacement_run(
    double chi, const std::function<Complex(double)>& drive, double horizon, Complex beta,
    int dim, const SchrodingerOptions& opts = {});

struct DisplacementPropertyCase {
    double g = 0.0;          // mode energy
    Complex b;               // squeezing coefficient
    Complex drive_a, drive_b;  // drive(t) = a sin(pi t/T) + b sin(2 pi t/T)
    DisplacementCheck check;
};

/// Seeded batch of displacement-theorem checks on random driven single-mode
/// Hamiltonians (bounded squeezing keeps the truncation adequate).
std::vector<DisplacementPropertyCase> displacement_theorem_property(std::uint64_t seed, int count,
                                                                    int dim,
                                                                    double horizon = 1.0);

struct TransportFidelityResult {
    double fidelity = 0.0;
    double leakage = 0.0;
    long steps = 0;
    double linear_endpoint_error = 0.0;  // classical LQR endpoint check
};

/// Anharmonic transport experiment: synthesize the optimal drive on the
/// linear (delta = 0) oscillator with weights (q, r), then propagate the
/// anharmonic H = a+a + (delta/2) a+a+aa + u(t)(a + a+) and report the
/// overlap with the coherent target (target_x + i target_p)/sqrt(2).
TransportFidelityResult transport_fidelity_experiment(double delta, double q_over_r,
                                                      double target_x = 2.0,
                                                      double target_p = 0.5, double horizon = 20.0,
                                                      int dim = 40,
                                                      const SchrodingerOptions& opts = {});

}  // namespace quadctrl
