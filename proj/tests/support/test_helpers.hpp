// Shared test utilities: seeded generators for random systems and
// Hamiltonians, plus reference oracles kept independent of the library
// code paths they check.
#pragma once

#include "quadctrl/controllability.hpp"
#include "quadctrl/linalg.hpp"
#include "quadctrl/model.hpp"

#include <random>

namespace quadctrl::testing {

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(gen_);
    }
    Complex complex_uniform(double scale) {
        return {uniform(-scale, scale), uniform(-scale, scale)};
    }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }

    Matrix complex_matrix(Eigen::Index rows, Eigen::Index cols, double scale = 1.0) {
        Matrix m(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i) {
            for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = complex_uniform(scale);
        }
        return m;
    }
    RealMatrix real_matrix(Eigen::Index rows, Eigen::Index cols, double scale = 1.0) {
        RealMatrix m(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i) {
            for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = uniform(-scale, scale);
        }
        return m;
    }
    Vector complex_vector(Eigen::Index n, double scale = 1.0) {
        Vector v(n);
        for (Eigen::Index i = 0; i < n; ++i) v(i) = complex_uniform(scale);
        return v;
    }

    /// Random Hamiltonian with Hermitian G and symmetric B.
    QuadraticHamiltonian hamiltonian(int n_modes, double b_scale = 0.3,
                                     std::vector<bool> mask = {}) {
        Matrix g = complex_matrix(n_modes, n_modes);
        g = 0.5 * (g + g.adjoint().eval());
        Matrix b = complex_matrix(n_modes, n_modes, b_scale);
        b = 0.5 * (b + b.transpose().eval());
        if (mask.empty()) mask.assign(static_cast<std::size_t>(n_modes), true);
        return QuadraticHamiltonian::create(n_modes, std::move(g), std::move(b),
                                            std::move(mask));
    }

    /// Random controllable system with a comfortably conditioned Grammian.
    /// The dynamics scale grows with the dimension: sluggish single-input
    /// systems of higher dimension otherwise leave their least reachable
    /// direction numerically out of reach on a unit horizon.
    LinearControlSystem controllable_system(int d, int m, double horizon = 1.0) {
        const double scale = 0.5 + 0.4 * d;
        for (int attempt = 0; attempt < 400; ++attempt) {
            Matrix a = complex_matrix(d, d, scale);
            Matrix c = complex_matrix(d, m, 1.0);
            LinearControlSystem sys = LinearControlSystem::create(a, c, BasisTag::custom);
            const KalmanReport report = analyze(sys);
            if (!report.controllable) continue;
            // Keep the steering problem well posed on the given horizon.
            Matrix block = Matrix::Zero(2 * d, 2 * d);
            block.topLeftCorner(d, d) = sys.a;
            block.topRightCorner(d, d) = sys.c * sys.c.adjoint();
            block.bottomRightCorner(d, d) = -sys.a.adjoint();
            const Matrix e = expm(Matrix(block * horizon));
            const Matrix q = e.topRightCorner(d, d) * e.topLeftCorner(d, d).adjoint();
            if (condition_number(q) < 1e8) return sys;
        }
        throw std::runtime_error("controllable_system: generation failed");
    }

    std::mt19937_64& engine() { return gen_; }

  private:
    std::mt19937_64 gen_;
};

/// Quadrature reference for the controllability Grammian: composite
/// Gauss-Legendre with interval doubling until two refinements agree.
/// Shares only the matrix exponential with the production path; the
/// assembly (integral vs block exponential) is independent.
inline Matrix grammian_by_quadrature(const LinearControlSystem& sys, double horizon,
                                     double tol = 1e-12) {
    const Eigen::Index d = sys.d();
    const Matrix cc = sys.c * sys.c.adjoint();
    auto integrate = [&](int intervals) {
        Matrix acc = Matrix::Zero(d, d);
        for (int k = 0; k < intervals; ++k) {
            const double a = horizon * k / intervals;
            const double b = horizon * (k + 1) / intervals;
            auto [nodes, weights] = gauss_legendre(12, a, b);
            for (std::size_t i = 0; i < nodes.size(); ++i) {
                const Matrix e = expm(Matrix(sys.a * nodes[i]));
                acc += weights[i] * (e * cc * e.adjoint());
            }
        }
        return acc;
    };
    Matrix coarse = integrate(4);
    for (int intervals = 8; intervals <= 256; intervals *= 2) {
        Matrix fine = integrate(intervals);
        if (max_abs(Matrix(fine - coarse)) <= tol * std::max(1.0, max_abs(fine))) return fine;
        coarse = std::move(fine);
    }
    return coarse;
}

}  // namespace quadctrl::testing
