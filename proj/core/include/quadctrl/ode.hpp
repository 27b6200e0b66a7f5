// Adaptive embedded Runge-Kutta integration with dense output.
#pragma once

#include "quadctrl/types.hpp"

#include <array>
#include <functional>
#include <vector>

namespace quadctrl {

struct IntegrationOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double initial_step = 0.0;  // 0 = choose automatically
    long max_steps = 4'000'000;
};

/// Piecewise-quartic continuous extension of a Dormand-Prince 5(4) solution.
///
/// Each accepted step stores the interpolation coefficients, so the solution
/// (and anything integrated against it, e.g. quadratic costs) can be sampled
/// anywhere in [t0, t1] at interpolation order 4 without re-integrating.
class DenseSolution {
  public:
    struct Segment {
        double t0 = 0.0;
        double h = 0.0;
        std::array<Vector, 5> cont;  // rcont1..rcont5
    };

    double t_begin() const { return t_begin_; }
    double t_end() const { return t_end_; }
    const Vector& y_end() const { return y_end_; }
    const std::vector<Segment>& segments() const { return segments_; }
    long accepted_steps() const { return static_cast<long>(segments_.size()); }
    long rejected_steps() const { return rejected_; }

    /// Solution value at t (clamped to [t_begin, t_end]).
    Vector at(double t) const;

  private:
    friend DenseSolution integrate_dopri5(
        const std::function<void(double, const Vector&, Vector&)>&, const Vector&, double,
        double, const IntegrationOptions&);

    std::vector<Segment> segments_;
    Vector y_end_;
    double t_begin_ = 0.0;
    double t_end_ = 0.0;
    long rejected_ = 0;
};

/// Integrates dy/dt = f(t, y) from t0 to t1 with the Dormand-Prince 5(4)
/// pair and per-step error control err <= abs_tol + rel_tol*|y|.
/// Throws NumericalError on step-size collapse, reporting the failing time.
DenseSolution integrate_dopri5(const std::function<void(double, const Vector&, Vector&)>& f,
                               const Vector& y0, double t0, double t1,
                               const IntegrationOptions& opts = {});

}  // namespace quadctrl
