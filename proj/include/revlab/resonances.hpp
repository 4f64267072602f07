#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "revlab/geometry.hpp"

namespace revlab {

// Radial scaling deformation g(r) = sign(r) f(|r|): f = 0 on [0, r1],
// f = r tan(theta) beyond 2 r1, monotone smoothstep ramp in between.
struct ScalingProfile {
    double theta = 0.3;
    double r_start = 0.0;  // r1

    // f and f' at radius s >= 0
    void eval(double s, double& f, double& fp) const;
    // g(r) = sign(r) f(|r|) and g'(r)
    void eval_signed(double r, double& g, double& gp) const;
};

ScalingProfile make_scaling_profile(double theta, double r1);

// Mode-k radial operator on the complex contour r + i g(r):
// -((1+ig')^{-1} d/dr)^2 + W_k(r + i g(r)), Dirichlet at +-L.
// Complex symmetric tridiagonal after the similarity by sqrt(1+ig').
struct ComplexScaledOperator {
    int k = 0;
    double theta = 0.0;
    double half_length = 0.0;
    std::size_t n = 0;      // interior points
    double dr = 0.0;
    std::vector<std::complex<double>> diag;
    std::vector<std::complex<double>> offdiag;
};

// Requires r1 >= end radius C so the analytic continuation of the potential is
// the exact closed form (k^2 - 1/4)/z^2 wherever g != 0.
ComplexScaledOperator build_scaled_operator(const Manifold& m, int k,
                                            const ScalingProfile& scaling,
                                            double half_length, std::size_t n);

struct Resonance {
    std::complex<double> omega;
    int k = 0;
    int multiplicity = 1;   // 2 for |k| >= 1 (+-k degeneracy)
    double residual = 0.0;  // eigen residual of the fine-grid solve
    double theta = 0.0;
};

struct ResonanceBox {
    double re_lo = 0.0, re_hi = 0.0;
    double im_lo = 0.0;  // <= 0; box is [re_lo, re_hi] x [im_lo, 0]
};

struct ResonanceSet {
    std::vector<Resonance> resonances;
    std::vector<Resonance> flagged;  // outside the trust region or unconverged
};

// Shift-invert eigenvalue search over the box.  With refine_grid the solve
// runs on two nested grids and Richardson-extrapolates (needed for the 1e-6
// agreement suites); without it a single grid is used (counting accuracy).
ResonanceSet compute_mode_resonances(const Manifold& m, int k, const ScalingProfile& scaling,
                                     const ResonanceBox& box, double half_length,
                                     std::size_t n_coarse, bool refine_grid = true);

// Outgoing-wave matching determinant: analytic in omega, zero exactly at
// resonances.  Integrates the mode ODE from Hankel data on both ends.
std::complex<double> shooting_determinant(const Manifold& m, int k,
                                          std::complex<double> omega);

// Complex secant refinement of a resonance seed; returns nullopt when the
// iteration leaves the validity region or fails to converge.
std::optional<std::complex<double>> refine_resonance_shooting(const Manifold& m, int k,
                                                              std::complex<double> seed,
                                                              double tol = 1e-11);

struct ResonanceCount {
    std::size_t count = 0;             // N(R, beta), with +-k multiplicities
    std::vector<Resonance> resonances;
};

// N(R, beta) = #{omega in [R, R+1] + i[-beta, 0]} over |k| <= mode_limit.
ResonanceCount count_resonances(const Manifold& m, double R, double beta,
                                const ScalingProfile& scaling, int mode_limit,
                                double half_length, std::size_t n_coarse, int workers = 0);

int resonance_mode_limit(const Manifold& m, double R);

}  // namespace revlab
