#include "quadctrl/model.hpp"

#include <cmath>
#include <utility>

namespace quadctrl {

QuadraticHamiltonian QuadraticHamiltonian::create(int n_modes, Matrix g, Matrix b,
                                                  std::vector<bool> drive_mask) {
    if (n_modes <= 0) throw InvalidInputError("QuadraticHamiltonian: n_modes must be positive");
    if (g.rows() != n_modes || g.cols() != n_modes || b.rows() != n_modes || b.cols() != n_modes) {
        throw InvalidInputError("QuadraticHamiltonian: G and B must be n_modes x n_modes");
    }
    if (drive_mask.size() != static_cast<std::size_t>(n_modes)) {
        throw InvalidInputError("QuadraticHamiltonian: drive_mask length must equal n_modes");
    }
    if (!is_hermitian(g, kStructureTol)) {
        throw InvalidInputError("QuadraticHamiltonian: G is not Hermitian within 1e-12");
    }
    if (!is_symmetric(b, kStructureTol)) {
        throw InvalidInputError("QuadraticHamiltonian: B is not symmetric within 1e-12");
    }
    QuadraticHamiltonian h;
    h.n_modes = n_modes;
    h.g = 0.5 * (g + g.adjoint().eval());
    h.b = 0.5 * (b + b.transpose().eval());
    h.drive_mask = std::move(drive_mask);
    return h;
}

int QuadraticHamiltonian::driven_mode_count() const {
    int count = 0;
    for (bool on : drive_mask) count += on ? 1 : 0;
    return count;
}

SymplecticGenerator build_generator(const QuadraticHamiltonian& h) {
    const int n = h.n_modes;
    SymplecticGenerator gen;
    gen.n_modes = n;
    gen.m.resize(2 * n, 2 * n);
    gen.m.topLeftCorner(n, n) = h.g;
    gen.m.topRightCorner(n, n) = h.b;
    gen.m.bottomLeftCorner(n, n) = h.b.conjugate();
    gen.m.bottomRightCorner(n, n) = h.g.conjugate();
    gen.eta.resize(2 * n);
    gen.eta.head(n).setOnes();
    gen.eta.tail(n).setConstant(-1.0);
    // Entrywise product keeps A = -i eta M exact, with no summation or
    // reassociation in between.
    gen.matrix.resize(2 * n, 2 * n);
    for (Eigen::Index i = 0; i < 2 * n; ++i) {
        for (Eigen::Index j = 0; j < 2 * n; ++j) {
            gen.matrix(i, j) = -kImag * (gen.eta(i) * gen.m(i, j));
        }
    }
    return gen;
}

Matrix control_matrix_from_mask(const QuadraticHamiltonian& h) {
    const int n = h.n_modes;
    Matrix c = Matrix::Zero(2 * n, 2 * n);
    for (int k = 0; k < n; ++k) {
        if (h.drive_mask[static_cast<std::size_t>(k)]) {
            c(k, k) = 1.0;
            c(n + k, n + k) = 1.0;
        }
    }
    return c;
}

LinearControlSystem control_system(const QuadraticHamiltonian& h) {
    return LinearControlSystem::create(build_generator(h).matrix, control_matrix_from_mask(h),
                                       BasisTag::mode_basis);
}

LinearControlSystem LinearControlSystem::create(Matrix a, Matrix c, BasisTag tag) {
    if (a.rows() != a.cols()) throw InvalidInputError("LinearControlSystem: A must be square");
    if (c.rows() != a.rows()) {
        throw InvalidInputError("LinearControlSystem: C must have d rows");
    }
    if (c.cols() < 1) throw InvalidInputError("LinearControlSystem: C needs at least one column");
    LinearControlSystem sys;
    sys.a = std::move(a);
    sys.c = std::move(c);
    sys.basis_tag = tag;
    return sys;
}

bool LinearControlSystem::is_real(double tol) const {
    return max_abs(Matrix(a.imag().cast<Complex>())) <= tol &&
           max_abs(Matrix(c.imag().cast<Complex>())) <= tol;
}

std::pair<RealMatrix, RealMatrix> LinearControlSystem::real_parts(double tol) const {
    const double residue = std::max(a.imag().cwiseAbs().maxCoeff(), c.imag().cwiseAbs().maxCoeff());
    if (residue > tol) {
        throw InvalidInputError("LinearControlSystem: imaginary residue " +
                                std::to_string(residue) + " exceeds tolerance");
    }
    return {a.real(), c.real()};
}

XPTransform XPTransform::create(int n_modes) {
    if (n_modes <= 0) throw InvalidInputError("XPTransform: n_modes must be positive");
    const int n = n_modes;
    const double s = 1.0 / std::sqrt(2.0);
    Matrix u = Matrix::Zero(2 * n, 2 * n);
    for (int k = 0; k < n; ++k) {
        u(k, k) = s;
        u(k, n + k) = s;
        u(n + k, k) = -kImag * s;
        u(n + k, n + k) = kImag * s;
    }
    return XPTransform{std::move(u)};
}

LinearControlSystem to_quadrature_basis(const LinearControlSystem& sys, const XPTransform& t,
                                        bool require_real) {
    if (sys.basis_tag != BasisTag::mode_basis) {
        throw InvalidInputError("to_quadrature_basis: system is not in the mode basis");
    }
    if (sys.d() % 2 != 0 || t.u_beta_alpha.rows() != sys.d()) {
        throw InvalidInputError("to_quadrature_basis: dimension mismatch");
    }
    const Matrix& u = t.u_beta_alpha;
    Matrix a = u * sys.a * u.adjoint();
    Matrix c = u * sys.c;
    if (require_real) {
        // Only the generator is expected to be real; the transformed drive
        // matrix U C picks up the transform's phases and stays complex.
        const double residue = a.imag().cwiseAbs().maxCoeff();
        if (residue > 1e-9) {
            throw NumericalError("to_quadrature_basis: imaginary residue " +
                                 std::to_string(residue) + " in requested real-valued result");
        }
        a = a.real().cast<Complex>();
    }
    return LinearControlSystem::create(std::move(a), std::move(c), BasisTag::quadrature_basis);
}

LinearControlSystem to_mode_basis(const LinearControlSystem& sys, const XPTransform& t) {
    if (sys.basis_tag != BasisTag::quadrature_basis) {
        throw InvalidInputError("to_mode_basis: system is not in the quadrature basis");
    }
    if (t.u_beta_alpha.rows() != sys.d()) {
        throw InvalidInputError("to_mode_basis: dimension mismatch");
    }
    const Matrix& u = t.u_beta_alpha;
    return LinearControlSystem::create(u.adjoint() * sys.a * u, u.adjoint() * sys.c,
                                       BasisTag::mode_basis);
}

LinearControlSystem build_xp_generator(const RealMatrix& gx, const RealMatrix& gp,
                                       const RealMatrix& bxp) {
    const Eigen::Index n = gx.rows();
    if (gx.cols() != n || gp.rows() != n || gp.cols() != n || bxp.rows() != n ||
        bxp.cols() != n) {
        throw InvalidInputError("build_xp_generator: Gx, Gp, B must all be n x n");
    }
    const double tol = QuadraticHamiltonian::kStructureTol;
    if (max_abs(RealMatrix(gx - gx.transpose())) > tol ||
        max_abs(RealMatrix(gp - gp.transpose())) > tol) {
        throw InvalidInputError("build_xp_generator: Gx and Gp must be symmetric");
    }
    RealMatrix a(2 * n, 2 * n);
    a.topLeftCorner(n, n) = bxp;
    a.topRightCorner(n, n) = gp;
    a.bottomLeftCorner(n, n) = -gx;
    a.bottomRightCorner(n, n) = -bxp;
    a *= 2.0;
    return LinearControlSystem::create(a.cast<Complex>(),
                                       Matrix::Identity(2 * n, 2 * n),
                                       BasisTag::quadrature_basis);
}

Matrix augment_affine(const LinearControlSystem& sys, const Vector& w) {
    if (w.size() != sys.d()) throw InvalidInputError("augment_affine: drive length must be d");
    const Eigen::Index d = sys.d();
    Matrix out = Matrix::Zero(d + 1, d + 1);
    out.topLeftCorner(d, d) = sys.a;
    out.topRightCorner(d, 1) = w;
    return out;
}

Matrix augment_affine(const SymplecticGenerator& gen, const Vector& c) {
    const Eigen::Index d = gen.matrix.rows();
    if (c.size() != d) throw InvalidInputError("augment_affine: drive length must be 2n");
    Matrix out = Matrix::Zero(d + 1, d + 1);
    out.topLeftCorner(d, d) = gen.matrix;
    out.topRightCorner(d, 1) = -kImag * gen.apply_eta(c);
    return out;
}

}  // namespace quadctrl
