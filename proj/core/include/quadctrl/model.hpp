// Quadratic bosonic Hamiltonians with linear drives and their mapping to
// classical linear control systems, in the mode (a, a+) or quadrature (x, p)
// basis.
#pragma once

#include "quadctrl/types.hpp"

#include <vector>

namespace quadctrl {

/// H = sum_ij G_ij a+_i a_j + (1/2) B_ij a+_i a+_j + (1/2) conj(B)_ij a_j a_i
/// plus per-mode linear drives on the modes marked in drive_mask.
/// G must be Hermitian and B symmetric (hbar = 1, all entries dimensionless).
struct QuadraticHamiltonian {
    int n_modes = 0;
    Matrix g;  // hopping, n x n Hermitian
    Matrix b;  // squeezing, n x n symmetric
    std::vector<bool> drive_mask;

    static constexpr double kStructureTol = 1e-12;

    /// Validates invariants and symmetrizes G, B within tolerance.
    /// Inputs whose Hermiticity/symmetry defect exceeds the tolerance are
    /// rejected rather than silently repaired.
    static QuadraticHamiltonian create(int n_modes, Matrix g, Matrix b,
                                       std::vector<bool> drive_mask);

    int driven_mode_count() const;
};

/// State ordering is fixed as (a_1..a_n, a+_1..a+_n); eta = diag(1..1,-1..-1)
/// and the equation of motion is d<alpha>/dt = -i eta M <alpha> - i eta c(t).
struct SymplecticGenerator {
    Matrix matrix;       // A = -i eta M, 2n x 2n
    RealVector eta;      // diagonal of eta
    Matrix m;            // M = [[G, B], [conj(B), conj(G)]], Hermitian
    int n_modes = 0;

    Matrix eta_matrix() const { return eta.cast<Complex>().asDiagonal(); }
    /// eta * v, applied entrywise.
    Vector apply_eta(const Vector& v) const { return eta.cast<Complex>().asDiagonal() * v; }
};

enum class BasisTag { mode_basis, quadrature_basis, custom };

/// dx/dt = A x + C u(t) with d state variables and m controls.
struct LinearControlSystem {
    Matrix a;  // d x d
    Matrix c;  // d x m
    BasisTag basis_tag = BasisTag::custom;

    Eigen::Index d() const { return a.rows(); }
    Eigen::Index m() const { return c.cols(); }

    static LinearControlSystem create(Matrix a, Matrix c, BasisTag tag = BasisTag::custom);

    bool is_real(double tol = 1e-12) const;
    /// Real parts of (A, C); throws if imaginary content exceeds tol.
    std::pair<RealMatrix, RealMatrix> real_parts(double tol = 1e-9) const;
};

/// Unitary change of basis beta = U_ba alpha between (a, a+) and (x, p),
/// U_ba = (1/sqrt 2) [[1, 1], [-i, i]] in n x n blocks.
struct XPTransform {
    Matrix u_beta_alpha;

    static XPTransform create(int n_modes);
    int n_modes() const { return static_cast<int>(u_beta_alpha.rows()) / 2; }
};

/// Assembles eta, M = [[G, B], [conj B, conj G]] and A = -i eta M.
/// A is formed entrywise from eta and M, so A == -i eta M holds exactly.
SymplecticGenerator build_generator(const QuadraticHamiltonian& h);

/// Diagonal 2n x 2n control mask: entry k is 1 when mode (k mod n) is driven.
Matrix control_matrix_from_mask(const QuadraticHamiltonian& h);

/// Mode-basis system for the Hamiltonian: A = -i eta M, C from the drive mask.
LinearControlSystem control_system(const QuadraticHamiltonian& h);

/// Conjugates a mode-basis system into the quadrature basis:
/// A' = U A U+, C' = U C. With require_real, verifies that the result is
/// real (imaginary residue above 1e-9 is an error).
LinearControlSystem to_quadrature_basis(const LinearControlSystem& sys, const XPTransform& t,
                                        bool require_real = false);

/// Inverse of to_quadrature_basis: A' = U+ A U, C' = U+ C.
LinearControlSystem to_mode_basis(const LinearControlSystem& sys, const XPTransform& t);

/// Quadrature-basis generator for H = sum Gx_ij x_i x_j + Gp_ij p_i p_j
/// + B_ij (x_i p_j + p_i x_j): A = 2 [[B, Gp], [-Gx, -B]] with state
/// ordering (x_1..x_n, p_1..p_n).
LinearControlSystem build_xp_generator(const RealMatrix& gx, const RealMatrix& gp,
                                       const RealMatrix& bxp);

/// Affine embedding [[A, w], [0, 0]] acting on the extended vector (x, 1).
Matrix augment_affine(const LinearControlSystem& sys, const Vector& w);

/// Affine embedding with the mode-basis drive mapping: [[A, -i eta c], [0, 0]].
Matrix augment_affine(const SymplecticGenerator& gen, const Vector& c);

}  // namespace quadctrl
