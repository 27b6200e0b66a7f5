// Shared scalar/matrix aliases and small numeric helpers.
#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace quadctrl {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr Complex kImag{0.0, 1.0};

/// Largest entry magnitude; zero for empty matrices.
template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline bool is_hermitian(const Matrix& m, double tol) {
    return m.rows() == m.cols() && max_abs(Matrix(m - m.adjoint())) <= tol;
}

inline bool is_symmetric(const Matrix& m, double tol) {
    return m.rows() == m.cols() && max_abs(Matrix(m - m.transpose())) <= tol;
}

/// Thrown when an input matrix or vector violates a structural precondition.
class InvalidInputError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown when a computation fails for numerical reasons (singularity,
/// ill-conditioning, step-size collapse, truncation overflow).
class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace quadctrl
