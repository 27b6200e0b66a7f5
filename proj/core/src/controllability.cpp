#include "quadctrl/controllability.hpp"

#include <cmath>
#include <limits>

namespace quadctrl {

Matrix kalman_matrix(const LinearControlSystem& sys) {
    const Eigen::Index d = sys.d();
    const Eigen::Index m = sys.m();
    Matrix k(d, d * m);
    k.leftCols(m) = sys.c;
    for (Eigen::Index l = 1; l < d; ++l) {
        k.middleCols(l * m, m) = sys.a * k.middleCols((l - 1) * m, m);
    }
    return k;
}

KalmanReport analyze(const LinearControlSystem& sys, const RankPolicy& policy) {
    KalmanReport report;
    report.kalman = kalman_matrix(sys);
    Eigen::JacobiSVD<Matrix> svd(report.kalman, Eigen::ComputeThinU);
    report.singular_values = svd.singularValues();
    const double smax = report.singular_values.size() > 0 ? report.singular_values(0) : 0.0;
    const double eps = std::numeric_limits<double>::epsilon();
    report.rank_tolerance =
        policy.absolute_threshold
            ? *policy.absolute_threshold
            : static_cast<double>(std::max(report.kalman.rows(), report.kalman.cols())) * eps *
                  smax;
    for (Eigen::Index i = 0; i < report.singular_values.size(); ++i) {
        if (report.singular_values(i) > report.rank_tolerance) ++report.numerical_rank;
    }
    report.controllable = report.numerical_rank == sys.d();
    report.subspace_basis = svd.matrixU().leftCols(report.numerical_rank);
    return report;
}

NormalModeReport normal_mode_analysis(const SymplecticGenerator& gen, const Vector& drive,
                                      const NormalModeTolerances& tol) {
    if (drive.size() != gen.matrix.rows()) {
        throw InvalidInputError("normal_mode_analysis: drive length must be 2n");
    }
    NormalModeReport report;
    const Matrix eta_m = gen.eta_matrix() * gen.m;
    Eigen::ComplexEigenSolver<Matrix> es(eta_m);
    if (es.info() != Eigen::Success) {
        report.diagnosis = NormalModeDiagnosis::non_diagonalizable;
        report.eigenvector_condition = std::numeric_limits<double>::infinity();
        return report;
    }
    report.eigenvalues = es.eigenvalues();
    report.eigenvector_condition = condition_number(es.eigenvectors());
    if (!(report.eigenvector_condition < tol.max_eigvec_condition)) {
        report.diagnosis = NormalModeDiagnosis::non_diagonalizable;
        return report;
    }

    const Eigen::Index d = eta_m.rows();
    report.min_eigenvalue_gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = i + 1; j < d; ++j) {
            report.min_eigenvalue_gap = std::min(
                report.min_eigenvalue_gap, std::abs(report.eigenvalues(i) - report.eigenvalues(j)));
        }
    }
    if (d < 2) report.min_eigenvalue_gap = std::numeric_limits<double>::infinity();

    const Vector eta_c = gen.apply_eta(drive);
    report.overlaps.resize(d);
    for (Eigen::Index k = 0; k < d; ++k) {
        Vector v = es.eigenvectors().col(k);
        v.normalize();
        report.overlaps(k) = std::abs(v.dot(eta_c));
    }

    const bool degenerate = report.min_eigenvalue_gap <= tol.gap_tol;
    const double overlap_floor = tol.overlap_tol * eta_c.norm();
    const bool missing_overlap = (report.overlaps.array() <= overlap_floor).any();
    if (degenerate && missing_overlap) {
        report.diagnosis = NormalModeDiagnosis::degenerate_and_zero_overlap;
    } else if (degenerate) {
        report.diagnosis = NormalModeDiagnosis::degenerate_spectrum;
    } else if (missing_overlap) {
        report.diagnosis = NormalModeDiagnosis::zero_overlap;
    } else {
        report.diagnosis = NormalModeDiagnosis::controllable;
    }
    return report;
}

namespace {

bool is_tridiagonal(const Matrix& m, double tol) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (std::abs(i - j) > 1 && std::abs(m(i, j)) > tol) return false;
        }
    }
    return true;
}

}  // namespace

ChainCriterionResult chain_criterion(const QuadraticHamiltonian& h, double tol) {
    if (!is_tridiagonal(h.g, tol) || !is_tridiagonal(h.b, tol)) {
        throw InvalidInputError("chain_criterion: G and B must be tridiagonal");
    }
    ChainCriterionResult result;
    result.satisfied = true;
    for (int j = 0; j + 1 < h.n_modes; ++j) {
        const int i = j + 1;
        const double gb = std::norm(h.b(i, j)) - std::norm(h.g(i, j));
        if (std::abs(gb) <= tol) {
            result.satisfied = false;
            result.failing_pairs.emplace_back(i + 1, j + 1);
        }
    }
    return result;
}

const char* to_string(NormalModeDiagnosis d) {
    switch (d) {
        case NormalModeDiagnosis::controllable: return "controllable";
        case NormalModeDiagnosis::degenerate_spectrum: return "degenerate_spectrum";
        case NormalModeDiagnosis::zero_overlap: return "zero_overlap";
        case NormalModeDiagnosis::degenerate_and_zero_overlap:
            return "degenerate_and_zero_overlap";
        case NormalModeDiagnosis::non_diagonalizable: return "non_diagonalizable";
    }
    return "unknown";
}

}  // namespace quadctrl
