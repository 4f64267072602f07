#include "revlab/geodesic_flow.hpp"

#include <cmath>
#include <limits>

#include "revlab/errors.hpp"

namespace revlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct FlowRhs {
    const Profile* p;
    double p0;
    void operator()(const std::array<double, 2>& y, std::array<double, 2>& dy) const {
        const auto j = p->eval(y[0]);
        dy[0] = y[1];
        dy[1] = j.d1 * p0 / (j.value * j.value * j.value);
    }
};

struct TangentRhs {
    const Profile* p;
    double p0;
    void operator()(const std::array<double, 6>& y, std::array<double, 6>& dy) const {
        const auto j = p->eval(y[0]);
        const double a3 = j.value * j.value * j.value;
        dy[0] = y[1];
        dy[1] = j.d1 * p0 / a3;
        // A = d/dr [alpha' p0 / alpha^3] = p0 (alpha''/alpha^3 - 3 alpha'^2/alpha^4)
        const double A = p0 * (j.d2 / a3 - 3.0 * j.d1 * j.d1 / (a3 * j.value));
        dy[2] = y[4];
        dy[3] = y[5];
        dy[4] = A * y[2];
        dy[5] = A * y[3];
    }
};

// In the exact Euclidean region (alpha = |r|, p = 1) the radial coordinate
// obeys |r(u)|^2 = r^2 + 2 r rho u + u^2 along the flow.
// Smallest u > 0 with |r(u)| = target, or +inf; both roots examined.
double euclid_crossing(double r, double rho, double target) {
    // r^2 + 2 r rho u + u^2 = target^2
    const double b = r * rho;
    const double c = r * r - target * target;
    const double disc = b * b - c;
    if (disc < 0.0) return kInf;
    const double sq = std::sqrt(disc);
    const double u1 = -b - sq, u2 = -b + sq;
    if (u1 > 0.0) return u1;
    if (u2 > 0.0) return u2;
    return kInf;
}

}  // namespace

ReducedState state_on_sphere(const Profile& p, double r, double rho) {
    if (std::abs(rho) > 1.0 + 1e-12) throw ConfigError("state_on_sphere: |rho| <= 1 required");
    const double a = p.eval(r).value;
    const double p0 = std::max(0.0, a * a * (1.0 - rho * rho));
    return {r, rho, p0};
}

double cosphere_residual(const Profile& p, const ReducedState& s) {
    const double a = p.eval(s.r).value;
    return std::abs(s.rho * s.rho + s.p0 / (a * a) - 1.0);
}

ReducedState flow(const Profile& p, const ReducedState& s, double t, const StepControl& ctl) {
    if (t == 0.0) return s;
    FlowRhs rhs{&p, s.p0};
    auto stepper = make_dopri5<double, 2>(rhs, ctl);
    stepper.start({s.r, s.rho}, 0.0);
    stepper.solve_to(t);
    const auto& y = stepper.state();
    return {y[0], y[1], s.p0};
}

double TangentState::norm2() const {
    // largest singular value of a 2x2 matrix
    const double a = jacobian[0], b = jacobian[1], c = jacobian[2], d = jacobian[3];
    const double f = a * a + b * b + c * c + d * d;
    const double det = a * d - b * c;
    const double disc = std::max(0.0, f * f - 4.0 * det * det);
    return std::sqrt(0.5 * (f + std::sqrt(disc)));
}

TangentState tangent_flow(const Profile& p, const ReducedState& s, double t,
                          const StepControl& ctl) {
    TangentRhs rhs{&p, s.p0};
    auto stepper = make_dopri5<double, 6>(rhs, ctl);
    stepper.start({s.r, s.rho, 1.0, 0.0, 0.0, 1.0}, 0.0);
    stepper.solve_to(t);
    const auto& y = stepper.state();
    TangentState out;
    out.base = {y[0], y[1], s.p0};
    out.jacobian = {y[2], y[3], y[4], y[5]};
    return out;
}

Trajectory sample_trajectory(const Profile& p, const ReducedState& s,
                             const std::vector<double>& t_grid, const StepControl& ctl) {
    Trajectory out;
    out.t = t_grid;
    out.states.reserve(t_grid.size());
    FlowRhs rhs{&p, s.p0};
    auto stepper = make_dopri5<double, 2>(rhs, ctl);
    stepper.start({s.r, s.rho}, 0.0);
    double current = 0.0;
    for (double t : t_grid) {
        if (t != current) {
            stepper.solve_to(t);
            current = t;
        }
        const auto& y = stepper.state();
        out.states.push_back({y[0], y[1], s.p0});
    }
    return out;
}

namespace {

// Shared implementation: first outward crossing of |r| = r1 on [0, t_max].
// Uses closed-form motion inside the Euclidean region and the monotone-escape
// guarantee (rho r >= 0 beyond the trapping radius means |r| never decreases).
double exit_time_impl(const Profile& p, double r1, ReducedState s, double t_max,
                      const StepControl& ctl) {
    const double C = p.end_radius();
    if (std::abs(s.r) > r1) return 0.0;

    double t = 0.0;
    FlowRhs rhs{&p, s.p0};
    auto stepper = make_dopri5<double, 2>(rhs, ctl);
    stepper.start({s.r, s.rho}, 0.0);

    while (t < t_max) {
        const double r = stepper.state()[0];
        const double rho = stepper.state()[1];
        const double rr = std::abs(r);
        const double rv = rho * (r < 0.0 ? -1.0 : 1.0);  // d|r|/dt

        // Exact motion in the Euclidean region: |r(u)|^2 = rr^2 + 2 rr rv u + u^2.
        if (rr >= C && rv >= 0.0) {
            if (rr >= r1) return t;
            const double u = euclid_crossing(rr, rv, r1);
            return (t + u <= t_max) ? t + u : kInf;
        }
        if (rr > C && rv < 0.0) {
            if (rr >= r1) return t;  // only reachable when the caller started here
            const double b = rr * rv;
            const double rmin2 = rr * rr - b * b;
            if (rmin2 >= C * C) {
                // turns around inside the flat region, exits across r1 > C
                const double u = euclid_crossing(rr, rv, r1);
                return (t + u <= t_max) ? t + u : kInf;
            }
            // dips into the core: jump to the entry point, resume numerically
            const double u_core = euclid_crossing(rr, rv, C);
            if (t + u_core >= t_max) return kInf;  // spends [t, t_max] inside B
            t += u_core;
            const double sgn = (r < 0.0 ? -1.0 : 1.0);
            const double new_rv = (b + u_core) / C;  // d|r|/dt at entry (< 0)
            stepper.start({sgn * C, sgn * new_rv}, t);
            continue;
        }

        if (!stepper.step(t_max)) {
            t = t_max;
            const double rf = std::abs(stepper.state()[0]);
            if (rf > r1) {
                // crossing inside the final step: bisect the dense output
                double lo = stepper.prev_time(), hi = stepper.time();
                for (int it = 0; it < 60; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    (std::abs(stepper.interpolate(mid)[0]) > r1 ? hi : lo) = mid;
                }
                return 0.5 * (lo + hi);
            }
            return kInf;
        }
        t = stepper.time();
        const double r_new = std::abs(stepper.state()[0]);
        if (r_new > r1) {
            double lo = stepper.prev_time(), hi = stepper.time();
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                (std::abs(stepper.interpolate(mid)[0]) > r1 ? hi : lo) = mid;
            }
            return 0.5 * (lo + hi);
        }
    }
    return kInf;
}

}  // namespace

double forward_exit_time(const Profile& p, double r1, const ReducedState& s, double t_max,
                         const StepControl& ctl) {
    return exit_time_impl(p, r1, s, t_max, ctl);
}

MembershipResult trapped_membership(const Profile& p, double r1, const ReducedState& s,
                                    double t, const StepControl& ctl) {
    MembershipResult out;
    const double fwd = exit_time_impl(p, r1, s, t, ctl);
    if (std::isfinite(fwd)) out.forward_escape_time = fwd;
    out.in_trapped = std::abs(s.r) <= r1 && !(std::isfinite(fwd) && fwd < t);
    ReducedState rev{s.r, -s.rho, s.p0};
    const double bwd = exit_time_impl(p, r1, rev, t, ctl);
    if (std::isfinite(bwd)) out.backward_escape_time = bwd;
    return out;
}

std::vector<double> tangent_growth_curve(const Profile& p, const ReducedState& s,
                                         const std::vector<double>& t_grid,
                                         const StepControl& ctl) {
    std::vector<double> out;
    out.reserve(t_grid.size());
    TangentRhs rhs{&p, s.p0};
    auto stepper = make_dopri5<double, 6>(rhs, ctl);
    stepper.start({s.r, s.rho, 1.0, 0.0, 0.0, 1.0}, 0.0);
    double current = 0.0;
    for (double t : t_grid) {
        if (t != current) {
            stepper.solve_to(t);
            current = t;
        }
        const auto& y = stepper.state();
        TangentState ts;
        ts.jacobian = {y[2], y[3], y[4], y[5]};
        out.push_back(std::log(ts.norm2()));
    }
    return out;
}

}  // namespace revlab
