// Matrix exponentials, cached propagators, rank decisions, quadrature nodes.
#pragma once

#include "quadctrl/types.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace quadctrl {

/// Matrix exponential e^M (scaling-and-squaring Pade).
Matrix expm(const Matrix& m);
RealMatrix expm(const RealMatrix& m);

/// Repeated evaluation of e^{At}. Diagonalizes A once when the eigenvector
/// basis is well conditioned, otherwise falls back to a fresh exponential
/// per call. Both routes meet the 1e-13 relative accuracy contract at desk
/// scale.
class Propagator {
  public:
    explicit Propagator(Matrix a, double max_eigvec_condition = 1e8);

    const Matrix& generator() const { return a_; }
    Eigen::Index dim() const { return a_.rows(); }
    bool diagonalized() const { return diag_.has_value(); }

    /// e^{At}.
    Matrix at(double t) const;
    /// e^{At} x.
    Vector apply(double t, const Vector& x) const;

  private:
    struct Diagonalization {
        Vector eigenvalues;
        Matrix v;
        Matrix v_inv;
    };
    Matrix a_;
    std::optional<Diagonalization> diag_;
};

/// 2-norm condition number via singular values; infinity when singular.
double condition_number(const Matrix& m);
double condition_number(const RealMatrix& m);

struct RankPolicy {
    /// Absolute singular-value threshold; if unset, use the scaled default
    /// max(rows, cols) * machine_epsilon * sigma_max.
    std::optional<double> absolute_threshold;
};

struct RankResult {
    int rank = 0;
    RealVector singular_values;
    double threshold = 0.0;
};

/// Count of singular values above the policy threshold.
RankResult numerical_rank(const Matrix& m, const RankPolicy& policy = {});

/// Nodes and weights of n-point Gauss-Legendre quadrature on [a, b].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n, double a, double b);

}  // namespace quadctrl
