#include "quadctrl/ode.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace quadctrl {

namespace {

// Dormand-Prince 5(4) tableau (Hairer, Norsett, Wanner, "Solving ODEs I").
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
// Dense-output weights for the quartic continuous extension.
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

double error_norm(const Vector& y0, const Vector& y1, const Vector& err, double atol,
                  double rtol) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < err.size(); ++i) {
        const double scale = atol + rtol * std::max(std::abs(y0(i)), std::abs(y1(i)));
        const double r = std::abs(err(i)) / scale;
        acc += r * r;
    }
    return std::sqrt(acc / static_cast<double>(err.size()));
}

}  // namespace

Vector DenseSolution::at(double t) const {
    if (segments_.empty()) return y_end_;
    t = std::clamp(t, t_begin_, t_end_);
    // Binary search for the segment containing t.
    std::size_t lo = 0, hi = segments_.size() - 1;
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (t < segments_[mid].t0 + segments_[mid].h) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    const Segment& s = segments_[lo];
    const double theta = (t - s.t0) / s.h;
    const double theta1 = 1.0 - theta;
    return s.cont[0] +
           theta * (s.cont[1] + theta1 * (s.cont[2] + theta * (s.cont[3] + theta1 * s.cont[4])));
}

DenseSolution integrate_dopri5(const std::function<void(double, const Vector&, Vector&)>& f,
                               const Vector& y0, double t0, double t1,
                               const IntegrationOptions& opts) {
    if (!(t1 > t0)) throw InvalidInputError("integrate_dopri5: require t1 > t0");
    const Eigen::Index n = y0.size();
    DenseSolution sol;
    sol.t_begin_ = t0;

    Vector y = y0;
    Vector k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n), yerr(n);
    f(t0, y, k1);

    double h = opts.initial_step;
    if (h <= 0.0) {
        const double span = t1 - t0;
        const double d0 = y.norm();
        const double d1n = k1.norm();
        h = (d1n > 1e-12) ? 0.01 * std::max(d0, 1.0) / d1n : span / 100.0;
        h = std::min(h, span / 10.0);
    }

    double t = t0;
    const double hmin_floor = 16.0 * std::numeric_limits<double>::epsilon();
    long steps = 0;
    while (t < t1) {
        if (++steps > opts.max_steps) {
            throw NumericalError("integrate_dopri5: exceeded max step count at t = " +
                                 std::to_string(t));
        }
        h = std::min(h, t1 - t);
        if (h < hmin_floor * std::max(std::abs(t), 1.0)) {
            throw NumericalError("integrate_dopri5: step size collapsed at t = " +
                                 std::to_string(t));
        }

        ytmp = y + h * (a21 * k1);
        f(t + c2 * h, ytmp, k2);
        ytmp = y + h * (a31 * k1 + a32 * k2);
        f(t + c3 * h, ytmp, k3);
        ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
        f(t + c4 * h, ytmp, k4);
        ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        f(t + c5 * h, ytmp, k5);
        ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        f(t + h, ytmp, k6);
        ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        f(t + h, ynew, k7);  // FSAL
        yerr = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        const double err = error_norm(y, ynew, yerr, opts.abs_tol, opts.rel_tol);
        if (err <= 1.0) {
            DenseSolution::Segment seg;
            seg.t0 = t;
            seg.h = h;
            const Vector ydiff = ynew - y;
            const Vector bspl = h * k1 - ydiff;
            seg.cont[0] = y;
            seg.cont[1] = ydiff;
            seg.cont[2] = bspl;
            seg.cont[3] = ydiff - h * k7 - bspl;
            seg.cont[4] = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
            sol.segments_.push_back(std::move(seg));

            t += h;
            y.swap(ynew);
            k1.swap(k7);
            const double factor =
                (err == 0.0) ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
            h *= factor;
        } else {
            ++sol.rejected_;
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
        }
    }
    sol.t_end_ = t1;
    sol.y_end_ = y;
    return sol;
}

}  // namespace quadctrl
