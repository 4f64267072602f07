#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>

#include "revlab/errors.hpp"

namespace revlab {

inline double scalar_abs(double x) { return std::abs(x); }
inline double scalar_abs(const std::complex<double>& x) { return std::abs(x); }

struct StepControl {
    double rtol = 1e-11;
    double atol = 1e-13;
    double max_step = std::numeric_limits<double>::infinity();
    double initial_step = 1e-3;
};

// Dormand-Prince 5(4) embedded pair with the standard quartic dense-output
// interpolant.  State is a fixed-size array of double or complex<double>.
template <class Scalar, std::size_t N, class Rhs>
class Dopri5 {
public:
    using State = std::array<Scalar, N>;

    Dopri5(Rhs rhs, StepControl ctl) : rhs_(rhs), ctl_(ctl) {}

    void start(const State& y0, double t0) {
        t_ = t0;
        y_ = y0;
        rhs_(y_, k_[0]);
        h_ = ctl_.initial_step;
        t_prev_ = t0;
        y_prev_ = y0;
    }

    double time() const { return t_; }
    double prev_time() const { return t_prev_; }
    const State& state() const { return y_; }
    const State& prev_state() const { return y_prev_; }

    // One accepted adaptive step toward t_end (never past it).  Returns false
    // when t_end has been reached.
    bool step(double t_end) {
        const double direction = (t_end >= t_) ? 1.0 : -1.0;
        double remaining = std::abs(t_end - t_);
        if (remaining <= 1e-14 * std::max(1.0, std::abs(t_end))) {
            t_ = t_end;
            return false;
        }

        for (int attempt = 0; attempt < 400; ++attempt) {
            double h = std::min({std::abs(h_), remaining, ctl_.max_step});
            if (h < 1e-14 * std::max(1.0, std::abs(t_)))
                throw NumericalError("ode: step size underflow at t=" + std::to_string(t_));
            const double hs = direction * h;

            State ytmp;
            for (int stage = 1; stage < 7; ++stage) {
                for (std::size_t i = 0; i < N; ++i) {
                    Scalar acc = Scalar(0);
                    for (int j = 0; j < stage; ++j) acc += Scalar(kA[stage - 1][j]) * k_[j][i];
                    ytmp[i] = y_[i] + Scalar(hs) * acc;
                }
                rhs_(ytmp, k_[stage]);
            }
            // stage 7 (k7 = f at the 5th-order solution) already computed:
            // ytmp after the loop is y5 and k_[6] its derivative.
            State y5 = ytmp;

            double err = 0.0;
            for (std::size_t i = 0; i < N; ++i) {
                Scalar e = Scalar(0);
                for (int j = 0; j < 7; ++j) e += Scalar(kE[j]) * k_[j][i];
                e *= Scalar(hs);
                const double sc = ctl_.atol + ctl_.rtol * std::max(scalar_abs(y_[i]), scalar_abs(y5[i]));
                const double r = scalar_abs(e) / sc;
                err += r * r;
            }
            err = std::sqrt(err / static_cast<double>(N));

            if (err <= 1.0) {
                // dense-output coefficients for this step
                for (std::size_t i = 0; i < N; ++i) {
                    const Scalar ydiff = y5[i] - y_[i];
                    const Scalar bspl = Scalar(hs) * k_[0][i] - ydiff;
                    rcont_[0][i] = y_[i];
                    rcont_[1][i] = ydiff;
                    rcont_[2][i] = bspl;
                    rcont_[3][i] = ydiff - Scalar(hs) * k_[6][i] - bspl;
                    Scalar acc = Scalar(0);
                    for (int j = 0; j < 7; ++j) acc += Scalar(kD[j]) * k_[j][i];
                    rcont_[4][i] = Scalar(hs) * acc;
                }
                t_prev_ = t_;
                y_prev_ = y_;
                t_ = t_ + hs;
                y_ = y5;
                k_[0] = k_[6];  // FSAL
                const double grow = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
                h_ = h * std::min(5.0, std::max(0.2, grow));
                return std::abs(t_end - t_) > 0.0;
            }
            h_ = h * std::min(1.0, std::max(0.2, 0.9 * std::pow(err, -0.2)));
        }
        throw NumericalError("ode: too many rejected steps at t=" + std::to_string(t_));
    }

    // Interpolate inside the last accepted step [prev_time, time].
    State interpolate(double t) const {
        const double span = t_ - t_prev_;
        const double theta = (span == 0.0) ? 0.0 : (t - t_prev_) / span;
        const double th1 = 1.0 - theta;
        State out;
        for (std::size_t i = 0; i < N; ++i) {
            out[i] = rcont_[0][i] +
                     Scalar(theta) * (rcont_[1][i] +
                                      Scalar(th1) * (rcont_[2][i] +
                                                     Scalar(theta) * (rcont_[3][i] + Scalar(th1) * rcont_[4][i])));
        }
        return out;
    }

    // Integrate all the way to t_end.
    void solve_to(double t_end) {
        if (t_ == t_end) return;
        while (step(t_end)) {
        }
    }

private:
    // Butcher tableau (Dormand & Prince 1980).
    static constexpr double kA[6][6] = {
        {1.0 / 5, 0, 0, 0, 0, 0},
        {3.0 / 40, 9.0 / 40, 0, 0, 0, 0},
        {44.0 / 45, -56.0 / 15, 32.0 / 9, 0, 0, 0},
        {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729, 0, 0},
        {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656, 0},
        {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
    // y5 - y4 error weights
    static constexpr double kE[7] = {71.0 / 57600,     0.0,          -71.0 / 16695, 71.0 / 1920,
                                     -17253.0 / 339200, 22.0 / 525,  -1.0 / 40};
    // dense output weights
    static constexpr double kD[7] = {-12715105075.0 / 11282082432.0, 0.0,
                                     87487479700.0 / 32700410799.0,  -10690763975.0 / 1880347072.0,
                                     701980252875.0 / 199316789632.0, -1453857185.0 / 822651844.0,
                                     69997945.0 / 29380423.0};

    Rhs rhs_;
    StepControl ctl_;
    double t_ = 0.0, t_prev_ = 0.0, h_ = 1e-3;
    State y_{}, y_prev_{};
    State k_[7]{};
    State rcont_[5]{};
};

template <class Scalar, std::size_t N, class Rhs>
Dopri5<Scalar, N, Rhs> make_dopri5(Rhs rhs, StepControl ctl) {
    return Dopri5<Scalar, N, Rhs>(rhs, ctl);
}

}  // namespace revlab
