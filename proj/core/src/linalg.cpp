#include "quadctrl/linalg.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <limits>

namespace quadctrl {

Matrix expm(const Matrix& m) {
    if (m.rows() != m.cols()) throw InvalidInputError("expm: matrix must be square");
    return m.exp();
}

RealMatrix expm(const RealMatrix& m) {
    if (m.rows() != m.cols()) throw InvalidInputError("expm: matrix must be square");
    return m.exp();
}

Propagator::Propagator(Matrix a, double max_eigvec_condition) : a_(std::move(a)) {
    if (a_.rows() != a_.cols()) throw InvalidInputError("Propagator: generator must be square");
    if (a_.rows() == 0) throw InvalidInputError("Propagator: empty generator");
    Eigen::ComplexEigenSolver<Matrix> es(a_);
    if (es.info() != Eigen::Success) return;
    const Matrix v = es.eigenvectors();
    if (condition_number(v) < max_eigvec_condition) {
        Diagonalization d;
        d.eigenvalues = es.eigenvalues();
        d.v = v;
        d.v_inv = v.inverse();
        diag_ = std::move(d);
    }
}

Matrix Propagator::at(double t) const {
    if (t == 0.0) return Matrix::Identity(a_.rows(), a_.cols());
    if (diag_) {
        Vector phases = (diag_->eigenvalues.array() * t).exp();
        return diag_->v * phases.asDiagonal() * diag_->v_inv;
    }
    return expm(Matrix(a_ * t));
}

Vector Propagator::apply(double t, const Vector& x) const {
    if (t == 0.0) return x;
    if (diag_) {
        Vector phases = (diag_->eigenvalues.array() * t).exp();
        return diag_->v * (phases.asDiagonal() * (diag_->v_inv * x));
    }
    return expm(Matrix(a_ * t)) * x;
}

namespace {

template <typename Mat>
double condition_number_impl(const Mat& m) {
    if (m.size() == 0) return std::numeric_limits<double>::infinity();
    Eigen::JacobiSVD<Mat> svd(m);
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    if (smin <= 0.0) return std::numeric_limits<double>::infinity();
    return sv(0) / smin;
}

}  // namespace

double condition_number(const Matrix& m) { return condition_number_impl(m); }
double condition_number(const RealMatrix& m) { return condition_number_impl(m); }

RankResult numerical_rank(const Matrix& m, const RankPolicy& policy) {
    if (m.size() == 0) throw InvalidInputError("numerical_rank: empty matrix");
    Eigen::JacobiSVD<Matrix> svd(m);
    RankResult out;
    out.singular_values = svd.singularValues();
    const double smax = out.singular_values.size() > 0 ? out.singular_values(0) : 0.0;
    const double eps = std::numeric_limits<double>::epsilon();
    out.threshold = policy.absolute_threshold
                        ? *policy.absolute_threshold
                        : static_cast<double>(std::max(m.rows(), m.cols())) * eps * smax;
    for (Eigen::Index i = 0; i < out.singular_values.size(); ++i) {
        if (out.singular_values(i) > out.threshold) ++out.rank;
    }
    return out;
}

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n, double a, double b) {
    if (n < 1) throw InvalidInputError("gauss_legendre: need at least one node");
    // Golub-Welsch: eigenvalues of the symmetric tridiagonal Jacobi matrix.
    RealMatrix jac = RealMatrix::Zero(n, n);
    for (int i = 1; i < n; ++i) {
        const double beta = i / std::sqrt(4.0 * i * i - 1.0);
        jac(i, i - 1) = beta;
        jac(i - 1, i) = beta;
    }
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(jac);
    std::vector<double> nodes(n), weights(n);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    for (int i = 0; i < n; ++i) {
        nodes[i] = mid + half * es.eigenvalues()(i);
        const double w0 = es.eigenvectors()(0, i);
        weights[i] = 2.0 * w0 * w0 * half;
    }
    return {std::move(nodes), std::move(weights)};
}

}  // namespace quadctrl
