// Kalman rank analysis, controllable subspaces, and the normal-mode and
// nearest-neighbour-chain controllability diagnostics.
#pragma once

#include "quadctrl/linalg.hpp"
#include "quadctrl/model.hpp"

#include <utility>
#include <vector>

namespace quadctrl {

struct KalmanReport {
    Matrix kalman;           // d x (d*m)
    RealVector singular_values;
    int numerical_rank = 0;
    double rank_tolerance = 0.0;
    bool controllable = false;
    Matrix subspace_basis;   // orthonormal columns spanning range(K)
};

enum class NormalModeDiagnosis {
    controllable,
    degenerate_spectrum,
    zero_overlap,
    degenerate_and_zero_overlap,
    non_diagonalizable,
};

struct NormalModeReport {
    Vector eigenvalues;           // spectrum of eta*M
    double min_eigenvalue_gap = 0.0;
    RealVector overlaps;          // |v_k^dag (eta c)| per normalized eigenvector
    NormalModeDiagnosis diagnosis = NormalModeDiagnosis::controllable;
    double eigenvector_condition = 0.0;
};

struct NormalModeTolerances {
    double gap_tol = 1e-9;        // absolute spectral-gap threshold
    double overlap_tol = 1e-10;   // relative to |eta c|
    double max_eigvec_condition = 1e8;
};

/// [C, AC, A^2 C, ..., A^{d-1} C] by repeated multiplication.
Matrix kalman_matrix(const LinearControlSystem& sys);

/// Kalman matrix, numerical rank, and an orthonormal basis of the
/// controllable subspace (left singular vectors of K).
KalmanReport analyze(const LinearControlSystem& sys, const RankPolicy& policy = {});

/// Spectral controllability diagnostics: eigenvalue gaps of eta*M and the
/// overlap of eta*c with each normal mode. The criterion is exact in theory,
/// so the thresholds are explicit inputs.
NormalModeReport normal_mode_analysis(const SymplecticGenerator& gen, const Vector& drive,
                                      const NormalModeTolerances& tol = {});

struct ChainCriterionResult {
    bool satisfied = false;
    std::vector<std::pair<int, int>> failing_pairs;  // 1-indexed (i, j), i = j + 1
};

/// Nearest-neighbour chain test: an end drive controls the whole chain only
/// if |b_ij|^2 != |g_ij|^2 on every sub-diagonal coupling. G and B must be
/// tridiagonal.
ChainCriterionResult chain_criterion(const QuadraticHamiltonian& h, double tol = 1e-12);

const char* to_string(NormalModeDiagnosis d);

}  // namespace quadctrl
