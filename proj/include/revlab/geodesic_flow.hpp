#pragma once

#include <array>
#include <optional>
#include <vector>

#include "revlab/geometry.hpp"
#include "revlab/ode.hpp"

namespace revlab {

// Phase point on the unit cosphere bundle modulo rotation:
// rho^2 + p0/alpha(r)^2 = 1, p0 >= 0 conserved.
struct ReducedState {
    double r = 0.0;
    double rho = 0.0;
    double p0 = 0.0;
};

// p0 chosen so the state lies on {p = 1}; requires |rho| <= 1.
ReducedState state_on_sphere(const Profile& p, double r, double rho);

// |rho^2 + p0/alpha^2 - 1|
double cosphere_residual(const Profile& p, const ReducedState& s);

// phi_t in reduced coordinates:  dr/dt = rho, drho/dt = alpha' p0 / alpha^3.
// p0 is carried exactly, never integrated.
ReducedState flow(const Profile& p, const ReducedState& s, double t,
                  const StepControl& ctl = {});

struct TangentState {
    ReducedState base;
    // d phi_t in (r, rho) at fixed p0, row-major [J11 J12; J21 J22].
    std::array<double, 4> jacobian{1.0, 0.0, 0.0, 1.0};
    double det() const { return jacobian[0] * jacobian[3] - jacobian[1] * jacobian[2]; }
    double norm2() const;  // spectral norm
};

TangentState tangent_flow(const Profile& p, const ReducedState& s, double t,
                          const StepControl& ctl = {});

struct Trajectory {
    std::vector<double> t;
    std::vector<ReducedState> states;
    std::optional<double> forward_escape_time;   // first |r| > r1, if observed
    std::optional<double> backward_escape_time;
};

Trajectory sample_trajectory(const Profile& p, const ReducedState& s,
                             const std::vector<double>& t_grid, const StepControl& ctl = {});

struct MembershipResult {
    bool in_trapped = false;  // state in T(t) = {|r(0)| <= r1 and |r(t)| <= r1}
    std::optional<double> forward_escape_time;
    std::optional<double> backward_escape_time;
};

// Decides membership in T(t) for B = {|r| <= r1}.  Integration stops early as
// soon as the monotone-escape bound |r(s+u)| >= |r(s)| + |rho(s)| u (valid once
// rho r >= 0 beyond the trapping region) settles the answer; inside the exact
// Euclidean region the exit time is computed in closed form.
MembershipResult trapped_membership(const Profile& p, double r1, const ReducedState& s,
                                    double t, const StepControl& ctl = {});

// First time |r| crosses r1 outward on [0, t_max]; +infinity if none.
// r1 must exceed the trapping radius, so the crossing is final.
double forward_exit_time(const Profile& p, double r1, const ReducedState& s, double t_max,
                         const StepControl& ctl = {});

// log of the spectral norm of J sampled at the given times (ascending, >= 0).
std::vector<double> tangent_growth_curve(const Profile& p, const ReducedState& s,
                                         const std::vector<double>& t_grid,
                                         const StepControl& ctl = {});

}  // namespace revlab
